#include "fpdwalk/results.hpp"

#include "fpdwalk/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace fpdwalk {

void ResultTable::add(std::string label, std::string statistic, double value, double tolerance,
                      bool pass) {
  rows.push_back({std::move(label), std::move(statistic), value, tolerance, pass});
}

void ResultTable::add_below(std::string label, std::string statistic, double value,
                            double tolerance) {
  add(std::move(label), std::move(statistic), value, tolerance, value < tolerance);
}

bool ResultTable::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass)
      return false;
  return true;
}

void ResultTable::append(const ResultTable& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

namespace {

// Keeps CSV fields free of separators.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

nlohmann::json number_or_string(double v) {
  if (std::isfinite(v))
    return v;
  if (std::isnan(v))
    return "nan";
  return v > 0 ? "inf" : "-inf";
}

} // namespace

void write_results_csv(std::ostream& os, const ResultTable& table) {
  os << "label,statistic,value,tolerance,pass\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : table.rows)
    os << csv_field(r.label) << ',' << csv_field(r.statistic) << ',' << r.value << ','
       << r.tolerance << ',' << (r.pass ? "true" : "false") << '\n';
  os.precision(old);
}

void write_results_json(std::ostream& os, const ResultTable& table, const std::string& timestamp) {
  nlohmann::json j;
  j["meta"] = {{"study", table.study},
               {"config_hash", table.provenance.config_hash},
               {"seed", table.provenance.seed},
               {"version", table.provenance.version},
               {"timestamp", timestamp},
               {"all_pass", table.all_pass()}};
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"label", r.label},
                    {"statistic", r.statistic},
                    {"value", number_or_string(r.value)},
                    {"tolerance", number_or_string(r.tolerance)},
                    {"pass", r.pass}});
  os << j.dump(2) << '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

std::filesystem::path write_study_output(const StudyOutput& out, const ExperimentConfig& cfg,
                                         const std::string& raw_config,
                                         const std::string& timestamp) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(cfg.output_dir) / std::string(to_string(cfg.study));
  fs::path dir = base / timestamp;
  for (int k = 1; fs::exists(dir); ++k)
    dir = base / (timestamp + "-" + std::to_string(k));
  fs::create_directories(dir);

  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f)
      throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("config.toml");
    f << (raw_config.empty() ? cfg.canonical() : raw_config);
  }
  {
    auto f = open("results.csv");
    write_results_csv(f, out.table);
  }
  {
    auto f = open("results.json");
    write_results_json(f, out.table, timestamp);
  }
  for (const auto& p : out.plots) {
    auto f = open(p.name);
    f << p.csv;
  }
  return dir;
}

} // namespace fpdwalk
