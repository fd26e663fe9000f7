#pragma once

#include "fpdwalk/heavy_tails.hpp"
#include "fpdwalk/pearson.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fpdwalk {

inline constexpr int kConfigSchemaVersion = 1;

enum class Study {
  GeneratorConvergence,
  Stationarity,
  SubordinatorLaplace,
  InverseSubordinator,
  CtrwMarginal,
  DensityConsistency,
};

std::string_view to_string(Study study);
Study parse_study(std::string_view text);

/// Parameters used when a config names a kind without theta/a/b/d:
/// OU (2, 1, 0), Jacobi (1, 1, 1), CIR (1, 2, 4, d = 0.5).
ChainParams default_chain_params(DiffusionKind kind);

/// One value of the key = value config format: a number, a string, or a
/// flat array of either.
using ConfigValue = std::variant<double, std::string, std::vector<double>, std::vector<std::string>>;

/// Parses `key = value` lines. Values are numbers, "strings", bare words,
/// or [a, b, ...] arrays on one line; `#` starts a comment. Duplicate keys
/// and malformed lines throw ConfigError naming the line.
std::map<std::string, ConfigValue> parse_key_values(std::string_view text);

/// Experiment description. See configs/ for annotated examples and the
/// README for the key list.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  Study study = Study::GeneratorConvergence;
  /// One kind, or all three (kind = "all") with their default parameters.
  std::vector<DiffusionKind> kinds{DiffusionKind::OU};
  /// Explicit chain parameters; only allowed with a single kind.
  std::optional<ChainParams> cp;
  std::vector<double> betas{0.7};
  std::vector<int> n_list{256, 1024, 4096, 16384};
  std::size_t paths = 5000;
  std::vector<double> times{1.0};
  std::uint64_t seed = 20240601;
  std::string output_dir = "results";
  std::optional<double> x0;
  WaitingLaw law = WaitingLaw::Pareto;
  unsigned workers = 0;
  /// Inverse-subordinator grid step.
  double grid_step = 1e-3;
  /// Laplace-transform arguments.
  std::vector<double> s_values{0.5, 1.0, 2.0};
  /// Subordinator increments assembled into D_1.
  int increments = 10;
  /// Stationarity run length and thinning lag.
  std::size_t steps = 1000000;
  std::size_t lag = 50;
  double ks_gate = 0.05;
  double significance = 0.01;

  ChainParams params_for(DiffusionKind kind) const;
  void validate() const;
  /// Canonical key = value form; two configs with the same canonical form
  /// run the same experiment.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), hex.
  std::string hash() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path, std::string* raw_text = nullptr);

} // namespace fpdwalk
