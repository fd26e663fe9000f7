#pragma once

#include "fpdwalk/pearson.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace fpdwalk {

/// Orthonormal polynomials q_0 = 1, q_1, ... defined by the recurrence
///   x q_n(x) = b_{n+1} q_{n+1}(x) + a_n q_n(x) + b_n q_{n-1}(x).
class OrthonormalPolynomials {
public:
  /// a.size() == b.size() == max_degree + 1; b[0] is unused.
  OrthonormalPolynomials(std::vector<double> a, std::vector<double> b);

  /// The family orthonormal under the stationary density of `diffusion`:
  /// Hermite (OU), Laguerre (CIR) or Jacobi (Jacobi), expressed in x.
  static OrthonormalPolynomials for_diffusion(const Diffusion& diffusion, int max_degree);

  int max_degree() const { return static_cast<int>(a_.size()) - 1; }
  double a(int n) const { return a_[static_cast<std::size_t>(n)]; }
  double b(int n) const { return b_[static_cast<std::size_t>(n)]; }

  /// Fills values[k] = q_k(x) for k < values.size().
  void evaluate(double x, std::span<double> values) const;
  /// Values and first two derivatives; all spans have the same length.
  void evaluate(double x, std::span<double> values, std::span<double> d1,
                std::span<double> d2) const;

private:
  std::vector<double> a_;
  std::vector<double> b_;
};

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule with `count` nodes for the weight the polynomials are
/// orthonormal under (Golub-Welsch, Newton-polished nodes, Christoffel
/// weights). Exact for polynomials of degree <= 2 count - 1.
GaussRule gauss_rule(const OrthonormalPolynomials& polys, int count);

/// Truncated eigen-expansion of the generator: A Q_n = -lambda_n Q_n for
/// n = 0..order with Q_n orthonormal under the stationary density m.
/// Immutable once built.
class EigenSystem {
public:
  EigenSystem(const Diffusion& diffusion, int order, int quadrature_nodes = 200);

  const Diffusion& diffusion() const { return diffusion_; }
  int order() const { return order_; }
  const OrthonormalPolynomials& polynomials() const { return polys_; }
  const GaussRule& quadrature() const { return rule_; }

  /// Rayleigh quotients -<A Q_n, Q_n>_m; these are the values used.
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// n tau (OU), n theta (CIR), gamma n (1 + delta (n - 1)) (Jacobi).
  const std::vector<double>& candidate_eigenvalues() const { return candidates_; }
  /// max |<Q_i, Q_j>_m - delta_ij| over i, j <= order.
  double gram_deviation() const { return gram_deviation_; }

  double eigenvalue(int n) const { return eigenvalues_[static_cast<std::size_t>(n)]; }
  /// Q_0..Q_order at x.
  std::vector<double> evaluate(double x) const;
  /// (A Q_n)(x) for n = 0..order.
  std::vector<double> generator_values(double x) const;

private:
  Diffusion diffusion_;
  int order_;
  OrthonormalPolynomials polys_;
  GaussRule rule_;
  std::vector<double> eigenvalues_;
  std::vector<double> candidates_;
  double gram_deviation_ = 0.0;
};

/// Candidate eigenvalue before verification.
double candidate_eigenvalue(const Diffusion& diffusion, int n);

/// Gram deviation limit above which construction fails.
inline constexpr double kGramTolerance = 1e-6;

/// max over `grid` of |A Q_n(x) + lambda_n Q_n(x)| / (1 + lambda_n).
double eigen_residual(const EigenSystem& system, int n, std::span<const double> grid);

/// JSON eigen table: recurrence coefficients, eigenvalues, candidates.
void write_eigen_table_json(std::ostream& os, const EigenSystem& system);

struct SpectralOptions {
  /// Starting truncation order.
  int order = 50;
  /// The order doubles (up to this cap) while the time factor of the last
  /// mode times |Q_N(y)| exceeds tail_tolerance.
  int max_order = 200;
  double tail_tolerance = 1e-12;
  int quadrature_nodes = 200;
};

struct DensityValue {
  double value = 0.0;
  /// |last retained term| / |running sum| > 1e-8.
  bool truncation_warning = false;
};

/// p_beta(x, t; y) = m(x) sum_n E_beta(-lambda_n t^beta) Q_n(y) Q_n(x).
class SpectralDensity {
public:
  SpectralDensity(std::shared_ptr<const EigenSystem> eigen, double beta, double y, double t);

  const EigenSystem& eigen() const { return *eigen_; }
  std::shared_ptr<const EigenSystem> eigen_ptr() const { return eigen_; }
  double beta() const { return beta_; }
  double start() const { return y_; }
  double time() const { return t_; }
  /// E_beta(-lambda_n t^beta).
  const std::vector<double>& time_factors() const { return factors_; }

  /// Raw truncated sum; may dip below zero where m(x) is tiny.
  DensityValue evaluate(double x) const;
  DensityValue evaluate_cdf(double x) const;
  /// Mean of the truncated density.
  double mean() const;

private:
  std::shared_ptr<const EigenSystem> eigen_;
  double beta_;
  double y_;
  double t_;
  std::vector<double> factors_;
  /// factors_[n] Q_n(y).
  std::vector<double> coeffs_;
};

/// Builds a density with adaptive truncation order.
SpectralDensity make_spectral_density(const Diffusion& diffusion, double beta, double y, double t,
                                      const SpectralOptions& options = {});

/// The truncated sum with negative truncation residue set to 0.
double fpd_density(const SpectralDensity& sd, double x);
/// Closed form through the flux identity
///   int_l^x m Q_n = -sigma^2(x) m(x) Q_n'(x) / (2 lambda_n),  n >= 1,
/// so F(x) = M(x) - sigma^2(x) m(x) / 2 sum_n c_n Q_n'(x) / lambda_n.
/// Clamped to [0, 1]; 0 at or below the lower end, 1 at or above the upper.
double fpd_cdf(const SpectralDensity& sd, double x);

/// CSV x,value.
void write_curve_csv(std::ostream& os, std::span<const double> xs, std::span<const double> values);

/// A function sampled on increasing times, starting at 0.
struct SampledFunction {
  std::vector<double> times;
  std::vector<double> values;
};

/// Mesh t_k = T (k / intervals)^grading, k = 0..intervals.
std::vector<double> graded_mesh(double horizon, std::size_t intervals, double grading);

/// Caputo derivative at t of the piecewise-linear interpolant of f:
///   (1/Gamma(1-beta)) int_0^t f'(s) (t-s)^(-beta) ds
/// equivalently the regularized Riemann-Liouville form
///   d/dt (1/Gamma(1-beta)) int_0^t f(s) (t-s)^(-beta) ds - f(0) t^(-beta) / Gamma(1-beta).
/// beta = 1 gives the one-sided difference quotient at t.
/// Uses samples with times <= t.
double caputo_derivative(const SampledFunction& f, double beta, double t);

} // namespace fpdwalk
