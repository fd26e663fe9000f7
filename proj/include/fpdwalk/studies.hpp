#pragma once

#include "fpdwalk/config.hpp"
#include "fpdwalk/pearson.hpp"
#include "fpdwalk/results.hpp"
#include "fpdwalk/spectral.hpp"

#include <string>
#include <vector>

namespace fpdwalk {

struct NamedTestFunction {
  std::string name;
  TestFunction f;
};

/// Bump psi(x) = (1 - u^2)^4 on |u| < 1, u = (x - c)/w, with x psi and
/// x^2 psi, plus the constant 1. All are C^3 with compact support (the
/// constant aside) and carry analytic derivatives.
std::vector<NamedTestFunction> bump_suite(double center, double width);
/// Center and width of the bump used for each kind.
std::pair<double, double> bump_placement(DiffusionKind kind);
/// Evaluation grid of the generator-convergence study.
std::vector<double> convergence_grid(DiffusionKind kind);

/// Closed form of A_n f at the embedded point for the Bernoulli-Laplace
/// chain, h = 2/(a sqrt n):
///   -theta (x + b/a) (f(x+h) - f(x))/h
///   + theta/(2a^2) (1 + (a x + b)/sqrt n)^2 (f(x+h) - 2f(x) + f(x-h))/h^2.
double ou_discrete_generator_closed_form(const ChainParams& cp, int n, const TestFunction& f,
                                         double x_embedded);

StudyOutput study_generator_convergence(const ExperimentConfig& cfg);
StudyOutput study_stationarity(const ExperimentConfig& cfg);
StudyOutput study_subordinator_laplace(const ExperimentConfig& cfg);
StudyOutput study_inverse_subordinator(const ExperimentConfig& cfg);
StudyOutput study_ctrw_marginal(const ExperimentConfig& cfg);
StudyOutput study_density_consistency(const ExperimentConfig& cfg);

/// Dispatches on cfg.study and fills the provenance.
StudyOutput run_study(const ExperimentConfig& cfg);

// Checks composing the density-consistency study.

/// E_{1/2}(-1) against e erfc(1) (1e-10) and E_1(-z) against exp(-z) (1e-12).
ResultTable check_mittag_leffler();
/// Gram identity (1e-8), eigen relation for n <= 10 (1e-6), and Rayleigh
/// quotients against the candidate eigenvalues.
ResultTable check_eigen_structure(DiffusionKind kind, const ChainParams& cp, int order = 50);
/// beta = 1 OU density against the Gaussian kernel, sup error < 1e-6.
ResultTable check_classical_reduction(const ChainParams& ou, const std::vector<double>& times);
/// |int p dx - 1| < 1e-4 by adaptive quadrature.
ResultTable check_normalization(DiffusionKind kind, const ChainParams& cp,
                                const std::vector<double>& betas, const std::vector<double>& times);
/// Caputo derivative of E_beta(-lambda t^beta) against -lambda E_beta(-lambda t^beta) at t,
/// relative error < 1e-3.
ResultTable check_caputo(const std::vector<double>& betas, const std::vector<double>& lambdas,
                         double t);
/// Flux-identity CDF against quadrature of the density, end values, and
/// monotonicity on a grid.
ResultTable check_cdf(DiffusionKind kind, const ChainParams& cp, double beta, double t);

/// int_lo^hi of the density by adaptive Gauss-Kronrod on subintervals.
double integrate_density(const SpectralDensity& sd, double lo, double hi);
/// Finite interval carrying all but a negligible part of the density.
std::pair<double, double> density_support(const SpectralDensity& sd);

} // namespace fpdwalk
