#pragma once

#include "fpdwalk/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpdwalk {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ResultRow {
  std::string label;
  std::string statistic;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kToolkitVersion;
};

struct ResultTable {
  std::string study;
  std::vector<ResultRow> rows;
  Provenance provenance;

  void add(std::string label, std::string statistic, double value, double tolerance, bool pass);
  /// Row passing iff value < tolerance.
  void add_below(std::string label, std::string statistic, double value, double tolerance);
  bool all_pass() const;
  void append(const ResultTable& other);
};

/// A named plot-data CSV produced by a study.
struct PlotFile {
  std::string name;
  std::string csv;
};

struct StudyOutput {
  ResultTable table;
  std::vector<PlotFile> plots;
};

/// CSV label,statistic,value,tolerance,pass. Byte-identical for identical
/// tables.
void write_results_csv(std::ostream& os, const ResultTable& table);
/// JSON with a meta block (study, config hash, seed, version, timestamp)
/// and the rows.
void write_results_json(std::ostream& os, const ResultTable& table, const std::string& timestamp);

/// UTC timestamp YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

/// Writes output_dir/{study}/{timestamp}/ with config.toml (the raw text
/// if given, else the canonical form), results.csv, results.json and the
/// plot files. Returns the directory.
std::filesystem::path write_study_output(const StudyOutput& out, const ExperimentConfig& cfg,
                                         const std::string& raw_config,
                                         const std::string& timestamp);

} // namespace fpdwalk
