#include "fpdwalk/acceptance.hpp"
#include "fpdwalk/cli.hpp"
#include "fpdwalk/config.hpp"
#include "fpdwalk/errors.hpp"
#include "fpdwalk/results.hpp"
#include "fpdwalk/stats.hpp"
#include "fpdwalk/studies.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fpdwalk;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fpdwalk");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fpdwalk_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

} // namespace

TEST_CASE("KS statistic edge cases") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic(EmpiricalCdf({0.5}), uniform) == doctest::Approx(0.5));
  CHECK(ks_statistic(EmpiricalCdf({-3.0, -2.0}), uniform) == 1.0);
  CHECK(ks_statistic(EmpiricalCdf({0.25, 0.75}), uniform) == doctest::Approx(0.25));
  // Ties are one jump of the ECDF.
  CHECK(ks_statistic(EmpiricalCdf({0.5, 0.5}), uniform) == doctest::Approx(0.5));
}

TEST_CASE("KS statistic of a sample from the reference CDF is below the 99% critical value") {
  Rng rng = stream_rng(12, 0);
  const std::size_t n = 5000;
  std::vector<double> s(n);
  for (auto& v : s)
    v = -std::log(uniform_open(rng));
  const double d = ks_statistic(EmpiricalCdf(s), [](double x) { return x > 0 ? 1 - std::exp(-x) : 0.0; });
  CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("Kolmogorov distribution critical values") {
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_survival(0.1) == 1.0);
  CHECK(ks_pvalue(0.0, 100) == 1.0);
  CHECK(ks_pvalue(0.5, 100) < 1e-10);
  const double d2 = ks_two_sample({0.0, 1.0, 2.0}, {0.5, 1.5, 2.5});
  CHECK(d2 == doctest::Approx(1.0 / 3.0));
  CHECK(ks_two_sample({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(ks_two_sample_pvalue(0.0, 10, 10) == 1.0);
}

TEST_CASE("chi-square goodness of fit") {
  // statistic (100 + 0 + 100) / 20 = 10 with 2 degrees of freedom,
  // survival exp(-10/2).
  const std::vector<double> obs{10, 20, 30};
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const ChiSquareResult r = chi_square_gof(obs, p);
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(r.dof == 2);
  CHECK(r.p_value == doctest::Approx(std::exp(-5.0)));
  const std::vector<double> exact{25, 25, 50};
  const std::vector<double> q{0.25, 0.25, 0.5};
  CHECK(chi_square_gof(exact, q).statistic == doctest::Approx(0.0));
  CHECK(chi_square_gof(exact, q).p_value == doctest::Approx(1.0));
  // Sparse categories are pooled.
  const std::vector<double> sparse{1, 1, 48, 50};
  const std::vector<double> ps{0.01, 0.01, 0.48, 0.5};
  CHECK(chi_square_gof(sparse, ps).bins == 2);
}

TEST_CASE("mean estimate") {
  const std::vector<double> v{1, 2, 3, 4};
  const MeanEstimate m = mean_estimate(v);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(m.count == 4);
  CHECK_THROWS_AS(mean_estimate(std::vector<double>{1.0}), InsufficientSampling);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"(
# comment
schema_version = 1
study = "ctrw_marginal"
kind = "cir"
theta = 1.5
beta = [0.6, 0.8]
n_list = [100, 200]
times = [0.5]
paths = 300
law = stable
)");
  CHECK(cfg.study == Study::CtrwMarginal);
  REQUIRE(cfg.kinds.size() == 1);
  CHECK(cfg.kinds[0] == DiffusionKind::CIR);
  CHECK(cfg.params_for(DiffusionKind::CIR).theta == 1.5);
  CHECK(cfg.params_for(DiffusionKind::CIR).a == 2.0); // default
  CHECK(cfg.betas == std::vector<double>{0.6, 0.8});
  CHECK(cfg.paths == 300);
  CHECK(cfg.law == WaitingLaw::PositiveStable);

  const auto all = parse_config("study = \"generator_convergence\"\nkind = \"all\"\n");
  CHECK(all.kinds.size() == 3);

  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind = \"ou\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"nope\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nkind = \"all\"\ntheta = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nn_list = [400, 200]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nseed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nschema_version = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("study = \"stationarity\"\nthis line is broken\n"), ConfigError);
}

TEST_CASE("canonical form and hash") {
  const auto a = parse_config("study = \"stationarity\"\nseed = 5\nworkers = 4\noutput_dir = \"x\"\n");
  const auto b = parse_config("seed = 5\nstudy = \"stationarity\"\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  const auto c = parse_config("study = \"stationarity\"\nseed = 6\n");
  CHECK(a.hash() != c.hash());
  // The canonical form parses back to itself.
  CHECK(parse_config(a.canonical()).canonical() == a.canonical());
}

TEST_CASE("bump suite derivatives against finite differences") {
  for (const auto& [name, f] : bump_suite(0.3, 2.0)) {
    CAPTURE(name);
    for (double x : {-1.2, 0.1, 0.9, 2.0}) {
      const double h = 1e-5;
      CHECK(f.first(x) == doctest::Approx((f(x + h) - f(x - h)) / (2 * h)).epsilon(1e-7));
      CHECK(f.second(x) ==
            doctest::Approx((f.first(x + h) - f.first(x - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK(f(5.0) == (name == "constant" ? 1.0 : 0.0));
  }
}

TEST_CASE("generator convergence: constant function has zero error") {
  ExperimentConfig cfg;
  cfg.study = Study::GeneratorConvergence;
  cfg.kinds = {DiffusionKind::Jacobi};
  cfg.n_list = {64, 128, 256};
  const StudyOutput out = run_study(cfg);
  bool seen = false;
  for (const auto& r : out.table.rows)
    if (r.label.rfind("jacobi/constant/n=", 0) == 0) {
      CHECK(r.value == 0.0);
      CHECK(r.pass);
      seen = true;
    }
  CHECK(seen);
  cfg.n_list = {64, 128};
  CHECK_THROWS_AS(run_study(cfg), ConfigError);
}

TEST_CASE("studies are reproducible byte for byte") {
  ExperimentConfig cfg;
  cfg.study = Study::CtrwMarginal;
  cfg.kinds = {DiffusionKind::Jacobi};
  cfg.n_list = {200};
  cfg.paths = 300;
  cfg.times = {0.0, 0.5};
  cfg.workers = 1;
  const StudyOutput a = run_study(cfg);
  cfg.workers = 2;
  const StudyOutput b = run_study(cfg);
  std::ostringstream ca;
  std::ostringstream cb;
  write_results_csv(ca, a.table);
  write_results_csv(cb, b.table);
  CHECK(ca.str() == cb.str());
  CHECK(a.table.rows.front().label == "jacobi/beta=0.7/t=0");
  CHECK(a.table.rows.front().value == 0.0);
  CHECK(a.table.provenance.config_hash == cfg.hash());
}

TEST_CASE("results CSV and JSON") {
  ResultTable t;
  t.study = "demo";
  t.add_below("a,b", "x", 1.0, 2.0);
  t.add("c", "y", std::nan(""), INFINITY, false);
  std::ostringstream csv;
  write_results_csv(csv, t);
  CHECK(csv.str() == "label,statistic,value,tolerance,pass\n\"a,b\",x,1,2,true\nc,y,nan,inf,false\n");
  std::ostringstream js;
  write_results_json(js, t, "20260101T000000Z");
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["meta"]["study"] == "demo");
  CHECK(j["meta"]["all_pass"] == false);
  CHECK(j["rows"][1]["value"] == "nan");
  CHECK(j["meta"]["timestamp"] == "20260101T000000Z");
}

TEST_CASE("CLI: density smoke") {
  const CliRun r = cli({"density", "--kind", "ou", "--beta", "0.7", "--t", "1", "--y", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("x,value\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 202);
  const CliRun c = cli({"density", "--kind", "jacobi", "--cdf", "--points", "11"});
  CHECK(c.code == 0);
}

TEST_CASE("CLI: unknown flag and bad values exit 2 with error JSON") {
  const CliRun r = cli({"density", "--kind", "ou", "--frobnicate"});
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j["message"].get<std::string>().find("--frobnicate") != std::string::npos);
  CHECK(cli({"density", "--kind", "student"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("CLI: study writes the output layout") {
  const fs::path dir = scratch_dir("study");
  const fs::path cfg = dir / "gen.toml";
  {
    std::ofstream f(cfg);
    f << "study = \"generator_convergence\"\nkind = \"ou\"\nn_list = [64, 256, 1024]\n";
  }
  const CliRun r = cli({"study", "--config", cfg.string(), "--output-dir", (dir / "out").string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["all_pass"] == true);
  const fs::path run = j["output"].get<std::string>();
  CHECK(run.parent_path() == dir / "out" / "generator_convergence");
  CHECK(fs::exists(run / "config.toml"));
  CHECK(fs::exists(run / "results.csv"));
  CHECK(fs::exists(run / "results.json"));
  CHECK(fs::exists(run / "generator_errors.csv"));

  const fs::path bad = dir / "bad.toml";
  {
    std::ofstream f(bad);
    f << "study = \"generator_convergence\"\nunknown_key = 3\n";
  }
  const CliRun b = cli({"study", "--config", bad.string()});
  CHECK(b.code == 2);
  CHECK(nlohmann::json::parse(b.err)["error"] == "config");
  CHECK(cli({"study", "--config", (dir / "missing.toml").string()}).code == 2);
}

TEST_CASE("CLI: gate failure exits 3") {
  const fs::path dir = scratch_dir("gate");
  const fs::path cfg = dir / "tight.toml";
  {
    std::ofstream f(cfg);
    f << "study = \"ctrw_marginal\"\nkind = \"ou\"\nn_list = [50]\npaths = 200\nks_gate = 0.000001\n";
  }
  CHECK(cli({"study", "--config", cfg.string(), "--output-dir", (dir / "out").string()}).code == 3);
}

TEST_CASE("CLI: simulate subcommands and selftest") {
  const CliRun c = cli({"simulate-chain", "--kind", "cir", "--n", "400", "--steps", "5", "--x0", "2"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("step,raw_state,rescaled_state\n0,40,2\n", 0) == 0);
  const CliRun e = cli({"simulate-ctrw", "--kind", "ou", "--n", "100", "--paths", "4"});
  CHECK(e.code == 0);
  CHECK(std::count(e.out.begin(), e.out.end(), '\n') == 5);
  CHECK(cli({"simulate-ctrw", "--law", "cauchy"}).code == 2);
  const CliRun s = cli({"selftest", "--only", "3", "5"});
  CHECK(s.code == 0);
  CHECK(s.out.find("PASS criterion 3") != std::string::npos);
  CHECK(s.out.find("PASS criterion 5") != std::string::npos);
  CHECK(cli({"selftest", "--only", "11"}).code == 2);
}

TEST_CASE("acceptance configs match the stated sizes") {
  const auto c10 = acceptance_config(10);
  REQUIRE(c10);
  CHECK(c10->n_list == std::vector<int>{2000});
  CHECK(c10->paths == 5000);
  CHECK(c10->kinds.size() == 3);
  CHECK(acceptance_config(8)->paths == 100000);
  CHECK_FALSE(acceptance_config(3));
  CHECK_THROWS(criterion_name(0));
}
