#include "fpdwalk/studies.hpp"

#include "fpdwalk/ctrw.hpp"
#include "fpdwalk/errors.hpp"
#include "fpdwalk/heavy_tails.hpp"
#include "fpdwalk/mittag_leffler.hpp"
#include "fpdwalk/stats.hpp"
#include "fpdwalk/urn_chains.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>

namespace fpdwalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ostringstream plot_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

std::string kind_name(DiffusionKind k) { return std::string(to_string(k)); }

// Stream family per (seed, experiment slot); path indices select streams
// inside a family.
std::uint64_t slot_seed(std::uint64_t seed, std::uint64_t slot) {
  return splitmix64(seed ^ splitmix64(slot + 0x51ed2701ULL));
}

} // namespace

std::vector<NamedTestFunction> bump_suite(double center, double width) {
  auto psi = [=](double x) {
    const double u = (x - center) / width;
    if (std::abs(u) >= 1.0)
      return 0.0;
    const double v = 1.0 - u * u;
    return v * v * v * v;
  };
  auto dpsi = [=](double x) {
    const double u = (x - center) / width;
    if (std::abs(u) >= 1.0)
      return 0.0;
    const double v = 1.0 - u * u;
    return -8.0 * u * v * v * v / width;
  };
  auto d2psi = [=](double x) {
    const double u = (x - center) / width;
    if (std::abs(u) >= 1.0)
      return 0.0;
    const double v = 1.0 - u * u;
    return -8.0 * v * v * (1.0 - 7.0 * u * u) / (width * width);
  };
  std::vector<NamedTestFunction> suite;
  suite.push_back({"psi", {psi, dpsi, d2psi}});
  suite.push_back({"x_psi",
                   {[=](double x) { return x * psi(x); },
                    [=](double x) { return psi(x) + x * dpsi(x); },
                    [=](double x) { return 2.0 * dpsi(x) + x * d2psi(x); }}});
  suite.push_back({"x2_psi",
                   {[=](double x) { return x * x * psi(x); },
                    [=](double x) { return 2.0 * x * psi(x) + x * x * dpsi(x); },
                    [=](double x) { return 2.0 * psi(x) + 4.0 * x * dpsi(x) + x * x * d2psi(x); }}});
  suite.push_back({"constant",
                   {[](double) { return 1.0; }, [](double) { return 0.0; },
                    [](double) { return 0.0; }}});
  return suite;
}

std::pair<double, double> bump_placement(DiffusionKind kind) {
  switch (kind) {
  case DiffusionKind::OU:
    return {0.3, 2.0};
  case DiffusionKind::Jacobi:
    return {0.5, 0.4};
  case DiffusionKind::CIR:
    return {2.0, 1.5};
  }
  return {0.0, 1.0};
}

std::vector<double> convergence_grid(DiffusionKind kind) {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  switch (kind) {
  case DiffusionKind::OU:
    lo = -4.0, hi = 4.0, step = 0.05;
    break;
  case DiffusionKind::Jacobi:
    lo = 0.01, hi = 0.99, step = 0.01;
    break;
  case DiffusionKind::CIR:
    lo = 0.01, hi = 10.0, step = 0.05;
    break;
  }
  std::vector<double> grid;
  const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= count; ++k)
    grid.push_back(lo + k * step);
  return grid;
}

double ou_discrete_generator_closed_form(const ChainParams& cp, int n, const TestFunction& f,
                                         double x) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double h = 2.0 / (cp.a * rn);
  const double fx = f(x);
  const double fp = f(x + h);
  const double fm = f(x - h);
  const double lift = 1.0 + (cp.a * x + cp.b) / rn;
  return -cp.theta * (x + cp.b / cp.a) * (fp - fx) / h +
         cp.theta / (2.0 * cp.a * cp.a) * lift * lift * (fp - 2.0 * fx + fm) / (h * h);
}

StudyOutput study_generator_convergence(const ExperimentConfig& cfg) {
  if (cfg.n_list.size() < 3)
    throw ConfigError("generator_convergence needs at least three chain sizes");
  StudyOutput out;
  auto plot = plot_stream();
  plot << "kind,function,n,sup_error\n";
  for (DiffusionKind kind : cfg.kinds) {
    const ChainParams cp = cfg.params_for(kind);
    const Diffusion diffusion = Diffusion::from_chain(kind, cp);
    const auto [center, width] = bump_placement(kind);
    const auto grid = convergence_grid(kind);
    for (const auto& [name, f] : bump_suite(center, width)) {
      std::vector<double> exact;
      for (double x : grid)
        exact.push_back(diffusion.generator_apply(f, x));
      std::vector<double> errors;
      double closed_form_gap = 0.0;
      for (int n : cfg.n_list) {
        const RescaledChainView view(kind, cp, n);
        double err = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
          const double approx = view.discrete_generator_apply(f, grid[k]);
          err = std::max(err, std::abs(approx - exact[k]));
          if (kind == DiffusionKind::OU) {
            const double x_emb = view.rescale(view.initial_state(grid[k]));
            const double closed = ou_discrete_generator_closed_form(cp, n, f, x_emb);
            closed_form_gap =
                std::max(closed_form_gap, std::abs(approx - closed) / (1.0 + std::abs(closed)));
          }
        }
        errors.push_back(err);
        plot << kind_name(kind) << ',' << name << ',' << n << ',' << err << '\n';
      }
      const std::string base = kind_name(kind) + "/" + name;
      for (std::size_t k = 0; k < errors.size(); ++k) {
        const std::string label = base + "/n=" + std::to_string(cfg.n_list[k]);
        if (k == 0) {
          out.table.add(label, "sup_error", errors[k], kInf, std::isfinite(errors[k]));
          continue;
        }
        // Identically zero errors (the constant function) count as decreasing.
        const bool both_zero = errors[k] == 0.0 && errors[k - 1] == 0.0;
        out.table.add(label, "sup_error", errors[k], errors[k - 1],
                      errors[k] < errors[k - 1] || both_zero);
      }
      const double last = errors.back();
      const double ref = errors[errors.size() - 3];
      const double ratio = (last == 0.0 && ref == 0.0) ? 0.0 : last / ref;
      out.table.add_below(base, "error_ratio_last_vs_third_last", ratio, 0.5);
      if (kind == DiffusionKind::OU)
        out.table.add_below(base, "closed_form_mismatch", closed_form_gap, 1e-9);
    }
  }
  out.plots.push_back({"generator_errors.csv", plot.str()});
  return out;
}

StudyOutput study_stationarity(const ExperimentConfig& cfg) {
  StudyOutput out;
  const int n = cfg.n_list.front();
  Rng rng = stream_rng(cfg.seed, 0);
  int state = n / 2;
  // Burn-in of ten thinning lags.
  for (std::size_t k = 0; k < 10 * cfg.lag; ++k)
    state = bl_step(n, state, rng);
  std::vector<double> counts(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    state = bl_step(n, state, rng);
    if (k % cfg.lag == 0)
      counts[static_cast<std::size_t>(state)] += 1.0;
  }
  const auto pi = bl_stationary(n);
  const ChiSquareResult chi = chi_square_gof(counts, pi);
  const boost::math::chi_squared dist(chi.dof);
  const double critical = boost::math::quantile(boost::math::complement(dist, cfg.significance));
  const std::string label = "bernoulli_laplace/n=" + std::to_string(n);
  out.table.add_below(label, "chi_square", chi.statistic, critical);
  out.table.add(label, "p_value", chi.p_value, cfg.significance, chi.p_value > cfg.significance);

  auto plot = plot_stream();
  plot << "state,observed_fraction,stationary_prob\n";
  double total = 0.0;
  for (double c : counts)
    total += c;
  for (std::size_t i = 0; i < counts.size(); ++i)
    plot << i << ',' << counts[i] / total << ',' << pi[i] << '\n';
  out.plots.push_back({"stationarity.csv", plot.str()});
  return out;
}

StudyOutput study_subordinator_laplace(const ExperimentConfig& cfg) {
  StudyOutput out;
  auto plot = plot_stream();
  plot << "beta,s,empirical,target,std_error\n";
  for (std::size_t bi = 0; bi < cfg.betas.size(); ++bi) {
    const StabilityIndex beta(cfg.betas[bi]);
    const double dt = 1.0 / cfg.increments;
    const std::uint64_t family = slot_seed(cfg.seed, bi);
    std::vector<double> d1(cfg.paths);
    for (std::size_t i = 0; i < cfg.paths; ++i) {
      Rng rng = stream_rng(family, i);
      double sum = 0.0;
      for (int k = 0; k < cfg.increments; ++k)
        sum += sample_stable_subordinator_increment(beta, dt, rng);
      d1[i] = sum;
    }
    for (double s : cfg.s_values) {
      std::vector<double> vals(d1.size());
      for (std::size_t i = 0; i < d1.size(); ++i)
        vals[i] = std::exp(-s * d1[i]);
      const MeanEstimate est = mean_estimate(vals);
      const double target = std::exp(-std::pow(s, beta.value()));
      out.table.add_below("beta=" + fmt(beta.value()) + "/s=" + fmt(s), "abs_dev_laplace",
                          std::abs(est.mean - target), 3.0 * est.std_error);
      plot << beta.value() << ',' << s << ',' << est.mean << ',' << target << ',' << est.std_error
           << '\n';
    }
  }
  out.plots.push_back({"laplace.csv", plot.str()});
  return out;
}

StudyOutput study_inverse_subordinator(const ExperimentConfig& cfg) {
  StudyOutput out;
  auto plot = plot_stream();
  plot << "beta,t,mean,target,std_error\n";
  const double t_max = *std::max_element(cfg.times.begin(), cfg.times.end());
  for (std::size_t bi = 0; bi < cfg.betas.size(); ++bi) {
    const StabilityIndex beta(cfg.betas[bi]);
    const std::uint64_t family = slot_seed(cfg.seed, 100 + bi);
    std::vector<std::vector<double>> hits(cfg.times.size(), std::vector<double>(cfg.paths));
    for (std::size_t i = 0; i < cfg.paths; ++i) {
      Rng rng = stream_rng(family, i);
      const SubordinatorPath path = simulate_subordinator(beta, cfg.grid_step, t_max, rng);
      for (std::size_t k = 0; k < cfg.times.size(); ++k)
        hits[k][i] = inverse_subordinator(path, cfg.times[k]);
    }
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      const double t = cfg.times[k];
      const double target = std::pow(t, beta.value()) / std::tgamma(1.0 + beta.value());
      const MeanEstimate est = mean_estimate(hits[k]);
      const std::string label = "beta=" + fmt(beta.value()) + "/t=" + fmt(t);
      out.table.add_below(label, "abs_dev_mean", std::abs(est.mean - target), 3.0 * est.std_error);
      if (t > 0.0) {
        // E[exp(-lambda E_t)] = E_beta(-lambda t^beta), so the mean is the
        // slope at lambda = 0.
        const double lambda = 1e-6;
        const double slope =
            (1.0 - mittag_leffler(beta.value(), -lambda * std::pow(t, beta.value()))) / lambda;
        out.table.add_below(label, "mittag_leffler_moment_rel_diff",
                            std::abs(slope - target) / target, 1e-5);
      }
      plot << beta.value() << ',' << t << ',' << est.mean << ',' << target << ',' << est.std_error
           << '\n';
    }
  }
  out.plots.push_back({"inverse_subordinator.csv", plot.str()});
  return out;
}

StudyOutput study_ctrw_marginal(const ExperimentConfig& cfg) {
  StudyOutput out;
  const int n = cfg.n_list.front();
  std::uint64_t slot = 0;
  for (DiffusionKind kind : cfg.kinds) {
    const ChainParams cp = cfg.params_for(kind);
    const Diffusion diffusion = Diffusion::from_chain(kind, cp);
    const double x0 = cfg.x0.value_or(diffusion.stationary_mean());
    const RescaledChainView view(kind, cp, n);
    const double y = view.rescale(view.initial_state(x0));
    for (double beta : cfg.betas) {
      if (beta == 1.0 && cfg.law != WaitingLaw::Deterministic)
        throw ConfigError("beta = 1 needs law = \"deterministic\"");
      CtrwSpec spec;
      spec.kind = kind;
      spec.cp = cp;
      spec.n = n;
      spec.x0 = x0;
      spec.waiting = WaitingTimeModel{beta, 1.0, cfg.law};
      for (double t : cfg.times) {
        const EnsembleResult res =
            run_ensemble(spec, t, cfg.paths, slot_seed(cfg.seed, 1000 + slot++), cfg.workers);
        const std::string tag = kind_name(kind) + "_beta" + fmt(beta) + "_t" + fmt(t);
        const std::string label = kind_name(kind) + "/beta=" + fmt(beta) + "/t=" + fmt(t);
        const EmpiricalCdf ecdf = empirical_cdf(res);
        if (t == 0.0) {
          // Point mass at the start: KS against the degenerate limit is the
          // fraction of paths that moved, zero by construction.
          std::size_t moved = 0;
          for (double v : res.samples)
            moved += v != y;
          out.table.add_below(label, "ks_distance",
                              static_cast<double>(moved) / static_cast<double>(res.paths),
                              cfg.ks_gate);
        } else {
          const SpectralDensity sd = make_spectral_density(diffusion, beta, y, t);
          const double ks = ks_statistic(ecdf, [&](double x) { return fpd_cdf(sd, x); });
          out.table.add_below(label, "ks_distance", ks, cfg.ks_gate);
          const MeanEstimate est = mean_estimate(res.samples);
          out.table.add_below(label, "abs_dev_mean", std::abs(est.mean - sd.mean()),
                              3.0 * est.std_error);

          auto ref = plot_stream();
          ref << "x,value\n";
          const double lo = ecdf.sorted().front();
          const double hi = ecdf.sorted().back();
          for (int k = 0; k <= 200; ++k) {
            const double x = lo + (hi - lo) * k / 200.0;
            ref << x << ',' << fpd_cdf(sd, x) << '\n';
          }
          out.plots.push_back({"reference_cdf_" + tag + ".csv", ref.str()});
        }
        std::ostringstream e;
        write_ecdf_csv(e, ecdf);
        out.plots.push_back({"ecdf_" + tag + ".csv", e.str()});
        std::ostringstream s;
        write_ensemble_csv(s, res);
        out.plots.push_back({"ensemble_" + tag + ".csv", s.str()});
      }
    }
  }
  return out;
}

std::pair<double, double> density_support(const SpectralDensity& sd) {
  const Diffusion& d = sd.eigen().diffusion();
  const double order = sd.eigen().order();
  const auto [s1, s2] = d.stationary_shape();
  switch (d.kind()) {
  case DiffusionKind::OU: {
    // Beyond the turning point sqrt(4N + 2) of the highest Hermite mode
    // every term decays like the Gaussian weight.
    const double reach = (std::sqrt(4.0 * order + 2.0) + 6.0) * std::sqrt(s2);
    return {s1 - reach, s1 + reach};
  }
  case DiffusionKind::CIR:
    return {0.0, (4.0 * order + 2.0 * s1 + 60.0) / s2};
  case DiffusionKind::Jacobi:
    return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

double integrate_density(const SpectralDensity& sd, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  const Diffusion& d = sd.eigen().diffusion();
  auto f = [&](double x) { return d.space().interior(x) ? fpd_density(sd, x) : 0.0; };
  std::vector<double> cuts;
  const int pieces = 24;
  for (int k = 0; k <= pieces; ++k)
    cuts.push_back(lo + (hi - lo) * k / pieces);
  if (sd.start() > lo && sd.start() < hi)
    cuts.push_back(sd.start());
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k])
      total += gauss_kronrod<double, 61>::integrate(f, cuts[k], cuts[k + 1], 12, 1e-10);
  return total;
}

ResultTable check_mittag_leffler() {
  ResultTable t;
  const double e_erfc = std::exp(1.0) * boost::math::erfc(1.0);
  t.add_below("E_0.5(-1)", "abs_err_vs_e_erfc1", std::abs(mittag_leffler(0.5, -1.0) - e_erfc),
              1e-10);
  for (double z : {0.1, 1.0, 10.0})
    t.add_below("E_1(-" + fmt(z) + ")", "abs_err_vs_exp",
                std::abs(mittag_leffler(1.0, -z) - std::exp(-z)), 1e-12);
  return t;
}

namespace {

std::vector<double> residual_grid(const Diffusion& d) {
  std::vector<double> grid;
  const double m = d.stationary_mean();
  const double s = std::sqrt(d.stationary_variance());
  double lo = m - 4.0 * s;
  double hi = m + 4.0 * s;
  if (d.kind() == DiffusionKind::CIR)
    lo = std::max(lo, 1e-3);
  if (d.kind() == DiffusionKind::Jacobi) {
    lo = 0.005;
    hi = 0.995;
  }
  for (int k = 0; k <= 200; ++k)
    grid.push_back(lo + (hi - lo) * k / 200.0);
  return grid;
}

} // namespace

ResultTable check_eigen_structure(DiffusionKind kind, const ChainParams& cp, int order) {
  ResultTable t;
  const Diffusion d = Diffusion::from_chain(kind, cp);
  const EigenSystem sys(d, order);
  const std::string base = kind_name(kind) + "/N=" + std::to_string(order);
  t.add_below(base, "gram_deviation", sys.gram_deviation(), 1e-8);

  // Gram entries of the low modes by composite Gauss-Legendre on the state
  // space, independent of the Gauss rule of the weight.
  {
    using Legendre = boost::math::quadrature::gauss<double, 30>;
    const int low = std::min(order, 5);
    const auto size = static_cast<std::size_t>(low) + 1;
    const StateSpace sp = d.space();
    const double s = std::sqrt(d.stationary_variance());
    const double lo = std::isfinite(sp.lower) ? sp.lower : d.stationary_mean() - 40.0 * s;
    const double hi = std::isfinite(sp.upper) ? sp.upper : d.stationary_mean() + 60.0 * s;
    std::vector<double> gram(size * size, 0.0);
    std::vector<double> q(size);
    const int pieces = 400;
    const double width = (hi - lo) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double mid = lo + (k + 0.5) * width;
      const auto& abscissa = Legendre::abscissa();
      const auto& weight = Legendre::weights();
      for (std::size_t r = 0; r < abscissa.size(); ++r)
        for (double sign : {-1.0, 1.0}) {
          if (r == 0 && sign > 0.0 && abscissa[0] == 0.0)
            continue;
          const double x = mid + sign * 0.5 * width * abscissa[r];
          if (!sp.interior(x))
            continue;
          sys.polynomials().evaluate(x, q);
          const double w = 0.5 * width * weight[r] * d.stationary_density(x);
          for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j <= i; ++j)
              gram[i * size + j] += w * q[i] * q[j];
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        worst = std::max(worst, std::abs(gram[i * size + j] - (i == j ? 1.0 : 0.0)));
    t.add_below(base, "gram_deviation_composite_low_modes", worst, 1e-8);
  }

  const auto grid = residual_grid(d);
  for (int n = 0; n <= std::min(order, 10); ++n)
    t.add_below(base + "/n=" + std::to_string(n), "eigen_residual", eigen_residual(sys, n, grid),
                1e-6);

  double worst = 0.0;
  for (int n = 0; n <= order; ++n) {
    const double cand = sys.candidate_eigenvalues()[static_cast<std::size_t>(n)];
    worst = std::max(worst, std::abs(sys.eigenvalue(n) - cand) / (1.0 + cand));
  }
  t.add_below(base, "rayleigh_vs_candidate_rel", worst, 1e-8);
  return t;
}

ResultTable check_classical_reduction(const ChainParams& ou, const std::vector<double>& times) {
  ResultTable table;
  const Diffusion d = Diffusion::from_chain(DiffusionKind::OU, ou);
  const double tau = d.params().drift_rate;
  const double mu = d.stationary_mean();
  const double var = d.stationary_variance();
  const double sdev = std::sqrt(var);
  for (double t : times) {
    double worst = 0.0;
    for (double y : {mu, mu + sdev, mu - 1.5 * sdev}) {
      const SpectralDensity sd = make_spectral_density(d, 1.0, y, t);
      const double m = mu + (y - mu) * std::exp(-tau * t);
      const double v = var * (1.0 - std::exp(-2.0 * tau * t));
      for (int k = -300; k <= 300; ++k) {
        const double x = mu + 6.0 * sdev * k / 300.0;
        const double g =
            std::exp(-(x - m) * (x - m) / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
        worst = std::max(worst, std::abs(fpd_density(sd, x) - g));
      }
    }
    table.add_below("ou/beta=1/t=" + fmt(t), "sup_err_vs_gaussian_kernel", worst, 1e-6);
  }
  return table;
}

ResultTable check_normalization(DiffusionKind kind, const ChainParams& cp,
                                const std::vector<double>& betas,
                                const std::vector<double>& times) {
  ResultTable table;
  const Diffusion d = Diffusion::from_chain(kind, cp);
  const double y = d.stationary_mean() + 0.3 * std::sqrt(d.stationary_variance());
  for (double beta : betas)
    for (double t : times) {
      if (!(t > 0.0))
        continue;
      const SpectralDensity sd = make_spectral_density(d, beta, y, t);
      const auto [lo, hi] = density_support(sd);
      const double mass = integrate_density(sd, lo, hi);
      table.add_below(kind_name(kind) + "/beta=" + fmt(beta) + "/t=" + fmt(t),
                      "abs_dev_total_mass", std::abs(mass - 1.0), 1e-4);
    }
  return table;
}

ResultTable check_caputo(const std::vector<double>& betas, const std::vector<double>& lambdas,
                         double t) {
  ResultTable table;
  auto sampled = [&](double beta, double lambda, std::size_t intervals) {
    SampledFunction f;
    const double grading = beta < 1.0 ? (2.0 - beta) / beta : 1.0;
    f.times = graded_mesh(t, intervals, grading);
    for (double s : f.times)
      f.values.push_back(mittag_leffler(beta, -lambda * std::pow(s, beta)));
    return f;
  };
  for (double beta : betas)
    for (double lambda : lambdas) {
      const double target = -lambda * mittag_leffler(beta, -lambda * std::pow(t, beta));
      const double coarse = caputo_derivative(sampled(beta, lambda, 2000), beta, t);
      const double fine = caputo_derivative(sampled(beta, lambda, 4000), beta, t);
      const std::string label = "beta=" + fmt(beta) + "/lambda=" + fmt(lambda);
      table.add_below(label, "rel_err_caputo", std::abs(fine - target) / std::abs(target), 1e-3);
      table.add_below(label, "rel_change_on_refinement", std::abs(fine - coarse) / std::abs(fine),
                      1e-3);
    }
  // The regularization removes constants.
  for (double beta : betas) {
    SampledFunction c;
    c.times = graded_mesh(t, 100, 2.0);
    c.values.assign(c.times.size(), 3.5);
    table.add_below("beta=" + fmt(beta) + "/constant", "abs_caputo",
                    std::abs(caputo_derivative(c, beta, t)), 1e-14);
  }
  return table;
}

ResultTable check_cdf(DiffusionKind kind, const ChainParams& cp, double beta, double t) {
  ResultTable table;
  const Diffusion d = Diffusion::from_chain(kind, cp);
  const bool symmetric_jacobi = kind == DiffusionKind::Jacobi && cp.a == cp.b;
  const double y = symmetric_jacobi ? 0.5 : d.stationary_mean() + 0.3 * std::sqrt(d.stationary_variance());
  const SpectralDensity sd = make_spectral_density(d, beta, y, t);
  const auto [lo, hi] = density_support(sd);
  const std::string base = kind_name(kind) + "/beta=" + fmt(beta) + "/t=" + fmt(t);

  const double m = d.stationary_mean();
  const double s = std::sqrt(d.stationary_variance());
  double gap = 0.0;
  for (int k = -4; k <= 4; ++k) {
    const double x = m + 0.75 * s * k;
    if (!d.space().interior(x))
      continue;
    gap = std::max(gap, std::abs(fpd_cdf(sd, x) - integrate_density(sd, lo, x)));
  }
  table.add_below(base, "cdf_vs_quadrature", gap, 1e-7);
  table.add_below(base, "cdf_at_lower_end", fpd_cdf(sd, lo), 1e-4);
  table.add_below(base, "one_minus_cdf_at_upper_end", 1.0 - fpd_cdf(sd, hi), 1e-4);

  double worst_drop = 0.0;
  double prev = 0.0;
  const double a = std::max(lo, m - 6.0 * s);
  const double b = std::min(hi, m + 6.0 * s);
  for (int k = 0; k <= 400; ++k) {
    const double v = fpd_cdf(sd, a + (b - a) * k / 400.0);
    if (k > 0)
      worst_drop = std::max(worst_drop, prev - v);
    prev = v;
  }
  table.add_below(base, "monotonicity_violation", worst_drop, 1e-6);
  if (symmetric_jacobi)
    table.add_below(base, "abs_dev_cdf_half", std::abs(fpd_cdf(sd, 0.5) - 0.5), 1e-10);
  return table;
}

StudyOutput study_density_consistency(const ExperimentConfig& cfg) {
  StudyOutput out;
  out.table.append(check_mittag_leffler());
  std::vector<double> times;
  for (double t : cfg.times)
    if (t > 0.0)
      times.push_back(t);
  if (times.empty())
    throw ConfigError("density_consistency needs at least one time > 0");
  for (DiffusionKind kind : cfg.kinds) {
    const ChainParams cp = cfg.params_for(kind);
    out.table.append(check_eigen_structure(kind, cp));
    out.table.append(check_normalization(kind, cp, cfg.betas, times));
    out.table.append(check_cdf(kind, cp, cfg.betas.front(), times.front()));
    if (kind == DiffusionKind::OU)
      out.table.append(check_classical_reduction(cp, {0.1, 0.5, 2.0}));

    const Diffusion d = Diffusion::from_chain(kind, cp);
    const double y = d.stationary_mean();
    for (double beta : cfg.betas) {
      const SpectralDensity sd = make_spectral_density(d, beta, y, times.front());
      const auto [lo, hi] = density_support(sd);
      const double m = d.stationary_mean();
      const double s = std::sqrt(d.stationary_variance());
      const double a = std::max(lo, m - 5.0 * s);
      const double b = std::min(hi, m + 5.0 * s);
      std::vector<double> xs;
      std::vector<double> ps;
      for (int k = 1; k < 400; ++k) {
        xs.push_back(a + (b - a) * k / 400.0);
        ps.push_back(fpd_density(sd, xs.back()));
      }
      std::ostringstream os;
      write_curve_csv(os, xs, ps);
      out.plots.push_back({"density_" + kind_name(kind) + "_beta" + fmt(beta) + "_t" +
                               fmt(times.front()) + ".csv",
                           os.str()});
    }
  }
  out.table.append(check_caputo({0.4, 0.6, 0.8}, {1.0, 3.0}, 1.0));
  return out;
}

StudyOutput run_study(const ExperimentConfig& cfg) {
  cfg.validate();
  StudyOutput out;
  switch (cfg.study) {
  case Study::GeneratorConvergence:
    out = study_generator_convergence(cfg);
    break;
  case Study::Stationarity:
    out = study_stationarity(cfg);
    break;
  case Study::SubordinatorLaplace:
    out = study_subordinator_laplace(cfg);
    break;
  case Study::InverseSubordinator:
    out = study_inverse_subordinator(cfg);
    break;
  case Study::CtrwMarginal:
    out = study_ctrw_marginal(cfg);
    break;
  case Study::DensityConsistency:
    out = study_density_consistency(cfg);
    break;
  }
  out.table.study = std::string(to_string(cfg.study));
  out.table.provenance.config_hash = cfg.hash();
  out.table.provenance.seed = cfg.seed;
  return out;
}

} // namespace fpdwalk
