#include "fpdwalk/cli.hpp"

#include "fpdwalk/acceptance.hpp"
#include "fpdwalk/config.hpp"
#include "fpdwalk/ctrw.hpp"
#include "fpdwalk/errors.hpp"
#include "fpdwalk/results.hpp"
#include "fpdwalk/spectral.hpp"
#include "fpdwalk/studies.hpp"
#include "fpdwalk/urn_chains.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fpdwalk {

namespace {

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  err << j.dump() << '\n';
}

struct ChainFlags {
  std::string kind = "ou";
  std::optional<double> theta;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> d;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "ou, jacobi or cir")->capture_default_str();
    app->add_option("--theta", theta, "chain parameter theta");
    app->add_option("--a", a, "chain parameter a");
    app->add_option("--b", b, "chain parameter b");
    app->add_option("--d", d, "CIR exponent d");
  }

  DiffusionKind parsed_kind() const { return parse_kind(kind); }

  ChainParams params() const {
    ChainParams cp = default_chain_params(parsed_kind());
    if (theta)
      cp.theta = *theta;
    if (a)
      cp.a = *a;
    if (b)
      cp.b = *b;
    if (d)
      cp.d = *d;
    validate(parsed_kind(), cp);
    return cp;
  }
};

std::ofstream open_file(const std::string& path) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot write " + path);
  return f;
}

int print_criteria(const std::vector<int>& ids, unsigned workers, std::ostream& out) {
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, workers);
    out << format_criterion(r) << std::endl;
    all = all && r.pass;
  }
  return all ? kExitOk : kExitGateFailure;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlated CTRWs and fractional Pearson diffusions"};
  app.require_subcommand(1);

  // simulate-chain
  auto* chain_cmd = app.add_subcommand("simulate-chain", "Simulate a rescaled urn chain path");
  ChainFlags chain_flags;
  chain_flags.attach(chain_cmd);
  int chain_n = 1000;
  std::size_t chain_steps = 1000;
  double chain_x0 = 0.0;
  std::uint64_t chain_seed = 1;
  std::string chain_out;
  chain_cmd->add_option("--n", chain_n, "chain size")->capture_default_str();
  chain_cmd->add_option("--steps", chain_steps, "number of transitions")->capture_default_str();
  chain_cmd->add_option("--x0", chain_x0, "start on the diffusion scale")->capture_default_str();
  chain_cmd->add_option("--seed", chain_seed, "seed")->capture_default_str();
  chain_cmd->add_option("--out", chain_out, "CSV file (default stdout)");

  // simulate-ctrw
  auto* ctrw_cmd = app.add_subcommand("simulate-ctrw", "Simulate a CTRW ensemble at one time");
  ChainFlags ctrw_flags;
  ctrw_flags.attach(ctrw_cmd);
  int ctrw_n = 2000;
  double ctrw_beta = 0.7;
  double ctrw_t = 1.0;
  std::size_t ctrw_paths = 5000;
  std::optional<double> ctrw_x0;
  std::uint64_t ctrw_seed = 1;
  std::string ctrw_law = "pareto";
  unsigned ctrw_workers = 0;
  std::string ctrw_out;
  ctrw_cmd->add_option("--n", ctrw_n, "chain size")->capture_default_str();
  ctrw_cmd->add_option("--beta", ctrw_beta, "stability index")->capture_default_str();
  ctrw_cmd->add_option("--t", ctrw_t, "time")->capture_default_str();
  ctrw_cmd->add_option("--paths", ctrw_paths, "ensemble size")->capture_default_str();
  ctrw_cmd->add_option("--x0", ctrw_x0, "start (default: stationary mean)");
  ctrw_cmd->add_option("--seed", ctrw_seed, "master seed")->capture_default_str();
  ctrw_cmd->add_option("--law", ctrw_law, "pareto, stable or deterministic")->capture_default_str();
  ctrw_cmd->add_option("--workers", ctrw_workers, "threads (0: hardware)")->capture_default_str();
  ctrw_cmd->add_option("--out", ctrw_out,
                       "file prefix: writes PREFIX.csv and PREFIX.json (default: CSV to stdout)");

  // density
  auto* density_cmd = app.add_subcommand("density", "Evaluate the fractional density or CDF");
  ChainFlags density_flags;
  density_flags.attach(density_cmd);
  double density_beta = 0.7;
  double density_t = 1.0;
  std::optional<double> density_y;
  std::optional<double> x_min;
  std::optional<double> x_max;
  int points = 201;
  bool want_cdf = false;
  density_cmd->add_option("--beta", density_beta, "stability index in (0, 1]")
      ->capture_default_str();
  density_cmd->add_option("--t", density_t, "time > 0")->capture_default_str();
  density_cmd->add_option("--y", density_y, "start (default: stationary mean)");
  density_cmd->add_option("--x-min", x_min, "left end of the grid");
  density_cmd->add_option("--x-max", x_max, "right end of the grid");
  density_cmd->add_option("--points", points, "grid points")->capture_default_str();
  density_cmd->add_flag("--cdf", want_cdf, "write the CDF instead of the density");

  // study
  auto* study_cmd = app.add_subcommand("study", "Run a study from a config file");
  std::string config_path;
  std::optional<std::string> output_dir;
  study_cmd->add_option("--config", config_path, "config file")->required();
  study_cmd->add_option("--output-dir", output_dir, "overrides output_dir");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance criteria");
  std::vector<int> only;
  unsigned self_workers = 0;
  self_cmd->add_option("--only", only, "criterion ids (default: all)")
      ->check(CLI::Range(1, kCriterionCount));
  self_cmd->add_option("--workers", self_workers, "threads for ensembles")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return kExitConfigError;
  }

  try {
    if (*chain_cmd) {
      const DiffusionKind kind = chain_flags.parsed_kind();
      const RescaledChainView view(kind, chain_flags.params(), chain_n);
      Rng rng = stream_rng(chain_seed, 0);
      const ChainPath path = simulate_chain(view, chain_x0, chain_steps, rng);
      if (chain_out.empty()) {
        write_path_csv(out, path);
      } else {
        auto f = open_file(chain_out);
        write_path_csv(f, path);
      }
      return kExitOk;
    }

    if (*ctrw_cmd) {
      CtrwSpec spec;
      spec.kind = ctrw_flags.parsed_kind();
      spec.cp = ctrw_flags.params();
      spec.n = ctrw_n;
      spec.x0 = ctrw_x0.value_or(Diffusion::from_chain(spec.kind, spec.cp).stationary_mean());
      spec.waiting = WaitingTimeModel{ctrw_beta, 1.0, parse_waiting_law(ctrw_law)};
      const EnsembleResult res = run_ensemble(spec, ctrw_t, ctrw_paths, ctrw_seed, ctrw_workers);
      if (ctrw_out.empty()) {
        write_ensemble_csv(out, res);
      } else {
        auto csv = open_file(ctrw_out + ".csv");
        write_ensemble_csv(csv, res);
        auto json = open_file(ctrw_out + ".json");
        write_ensemble_json(json, res);
      }
      return kExitOk;
    }

    if (*density_cmd) {
      const DiffusionKind kind = density_flags.parsed_kind();
      const Diffusion d = Diffusion::from_chain(kind, density_flags.params());
      if (points < 2)
        throw InvalidParameter("--points must be at least 2");
      const double y = density_y.value_or(d.stationary_mean());
      const SpectralDensity sd = make_spectral_density(d, density_beta, y, density_t);
      const auto [lo, hi] = density_support(sd);
      const double m = d.stationary_mean();
      const double s = std::sqrt(d.stationary_variance());
      const double a = x_min.value_or(std::max(lo, m - 5.0 * s));
      const double b = x_max.value_or(std::min(hi, m + 5.0 * s));
      if (!(a < b))
        throw InvalidParameter("--x-min must be below --x-max");
      std::vector<double> xs;
      std::vector<double> vs;
      for (int k = 0; k < points; ++k) {
        const double x = a + (b - a) * k / (points - 1);
        if (!d.space().interior(x))
          continue;
        xs.push_back(x);
        vs.push_back(want_cdf ? fpd_cdf(sd, x) : fpd_density(sd, x));
      }
      write_curve_csv(out, xs, vs);
      return kExitOk;
    }

    if (*study_cmd) {
      std::string raw;
      ExperimentConfig cfg = load_config(config_path, &raw);
      if (output_dir)
        cfg.output_dir = *output_dir;
      const StudyOutput result = run_study(cfg);
      const std::string stamp = utc_timestamp();
      const auto dir = write_study_output(result, cfg, raw, stamp);
      std::size_t failed = 0;
      for (const auto& r : result.table.rows)
        failed += !r.pass;
      nlohmann::json summary{{"study", result.table.study},
                             {"output", dir.string()},
                             {"config_hash", result.table.provenance.config_hash},
                             {"rows", result.table.rows.size()},
                             {"failed", failed},
                             {"all_pass", result.table.all_pass()}};
      out << summary.dump() << '\n';
      return result.table.all_pass() ? kExitOk : kExitGateFailure;
    }

    if (*self_cmd) {
      std::vector<int> ids = only;
      if (ids.empty())
        for (int id = 1; id <= kCriterionCount; ++id)
          ids.push_back(id);
      return print_criteria(ids, self_workers, out);
    }
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return kExitConfigError;
  } catch (const InvalidParameter& e) {
    emit_error(err, "invalid_parameter", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    emit_error(err, "runtime", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace fpdwalk
