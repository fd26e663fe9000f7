#include "fpdwalk/acceptance.hpp"

#include "fpdwalk/errors.hpp"
#include "fpdwalk/studies.hpp"

#include <chrono>
#include <cstdio>

namespace fpdwalk {

namespace {

const std::vector<DiffusionKind> kAllKinds{DiffusionKind::OU, DiffusionKind::Jacobi,
                                           DiffusionKind::CIR};

ExperimentConfig base_config(Study study) {
  ExperimentConfig cfg;
  cfg.study = study;
  cfg.kinds = kAllKinds;
  return cfg;
}

std::string summarize(const ResultTable& table) {
  std::size_t failed = 0;
  const ResultRow* first = nullptr;
  for (const auto& r : table.rows)
    if (!r.pass) {
      ++failed;
      if (!first)
        first = &r;
    }
  std::string s = std::to_string(table.rows.size()) + " rows";
  if (table.rows.empty())
    return s + ", no rows";
  if (first) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ", %zu failed; first %s %s = %.6g vs %.6g", failed,
                  first->label.c_str(), first->statistic.c_str(), first->value, first->tolerance);
    s += buf;
  }
  return s;
}

} // namespace

std::string criterion_name(int id) {
  switch (id) {
  case 1:
    return "generator_convergence";
  case 2:
    return "bernoulli_laplace_stationarity";
  case 3:
    return "mittag_leffler_accuracy";
  case 4:
    return "spectral_eigen_structure";
  case 5:
    return "classical_reduction";
  case 6:
    return "density_normalization";
  case 7:
    return "caputo_eigen_relation";
  case 8:
    return "subordinator_laplace";
  case 9:
    return "inverse_subordinator_moment";
  case 10:
    return "ctrw_weak_convergence";
  }
  throw InvalidParameter("criterion id must be in 1..10");
}

std::optional<ExperimentConfig> acceptance_config(int id) {
  switch (id) {
  case 1: {
    auto cfg = base_config(Study::GeneratorConvergence);
    cfg.n_list = {256, 1024, 4096, 16384};
    return cfg;
  }
  case 2: {
    auto cfg = base_config(Study::Stationarity);
    cfg.kinds = {DiffusionKind::OU};
    cfg.n_list = {20};
    cfg.steps = 1000000;
    cfg.significance = 0.01;
    return cfg;
  }
  case 8: {
    auto cfg = base_config(Study::SubordinatorLaplace);
    cfg.kinds = {DiffusionKind::OU};
    cfg.betas = {0.3, 0.5, 0.7, 0.9};
    cfg.s_values = {0.5, 1.0, 2.0};
    cfg.paths = 100000;
    return cfg;
  }
  case 9: {
    auto cfg = base_config(Study::InverseSubordinator);
    cfg.kinds = {DiffusionKind::OU};
    cfg.betas = {0.5, 0.7};
    cfg.times = {1.0};
    cfg.paths = 100000;
    cfg.grid_step = 1e-3;
    return cfg;
  }
  case 10: {
    auto cfg = base_config(Study::CtrwMarginal);
    cfg.betas = {0.7, 0.9};
    cfg.n_list = {2000};
    cfg.paths = 5000;
    cfg.times = {1.0};
    cfg.ks_gate = 0.05;
    return cfg;
  }
  default:
    criterion_name(id);
    return std::nullopt;
  }
}

CriterionResult run_criterion(int id, unsigned workers) {
  CriterionResult res;
  res.id = id;
  res.name = criterion_name(id);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (auto cfg = acceptance_config(id)) {
      cfg->workers = workers;
      res.table = run_study(*cfg).table;
      if (id == 10) {
        // The gate is the KS distance; the mean rows stay in the study output.
        std::erase_if(res.table.rows,
                      [](const ResultRow& r) { return r.statistic != "ks_distance"; });
      }
    } else {
      ResultTable& t = res.table;
      switch (id) {
      case 3:
        t = check_mittag_leffler();
        break;
      case 4:
        for (DiffusionKind k : kAllKinds)
          t.append(check_eigen_structure(k, default_chain_params(k), 50));
        break;
      case 5:
        t = check_classical_reduction(default_chain_params(DiffusionKind::OU), {0.1, 0.5, 2.0});
        break;
      case 6:
        for (DiffusionKind k : kAllKinds)
          t.append(check_normalization(k, default_chain_params(k), {0.5, 0.7}, {0.5, 1.0}));
        break;
      case 7:
        t = check_caputo({0.4, 0.6, 0.8}, {1.0, 3.0}, 1.0);
        break;
      }
    }
    res.table.study = res.name;
    res.pass = !res.table.rows.empty() && res.table.all_pass();
    res.detail = summarize(res.table);
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::string format_criterion(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, ", %.2f s)", r.seconds);
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " " +
         r.name + " (" + r.detail + buf;
}

} // namespace fpdwalk
