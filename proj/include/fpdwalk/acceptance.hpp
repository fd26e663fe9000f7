#pragma once

#include "fpdwalk/config.hpp"
#include "fpdwalk/results.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fpdwalk {

inline constexpr int kCriterionCount = 10;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Row count and the first failing row, if any.
  std::string detail;
  double seconds = 0.0;
  ResultTable table;
};

std::string criterion_name(int id);

/// Study configuration behind criteria 1, 2, 8, 9 and 10; nullopt for the
/// criteria evaluated by direct checks.
std::optional<ExperimentConfig> acceptance_config(int id);

/// Runs one criterion at its stated sizes and tolerances. `workers` only
/// affects the ensemble criteria and never the result.
CriterionResult run_criterion(int id, unsigned workers = 0);

/// One line: "PASS criterion 3 mittag_leffler_accuracy (4 rows, 0.01 s)".
std::string format_criterion(const CriterionResult& r);

} // namespace fpdwalk
