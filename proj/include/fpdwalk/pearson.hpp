#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

namespace fpdwalk {

/// The three Pearson diffusions with non-heavy-tailed stationary laws.
enum class DiffusionKind { OU, CIR, Jacobi };

std::string_view to_string(DiffusionKind kind);
/// Accepts "ou", "cir", "jacobi" (case-insensitive).
DiffusionKind parse_kind(std::string_view text);

/// Raw urn-chain parameters.
///
/// OU chain (Bernoulli-Laplace): theta > 0, a != 0, b real.
/// Jacobi chain (Wright-Fisher, alpha = a/n): theta > 0, a, b > 0.
/// CIR chain (Wright-Fisher, alpha = a/n^d): theta > 0, a, b > 0, 0 < d < 1.
/// `d` is ignored for OU and Jacobi.
struct ChainParams {
  double theta = 1.0;
  double a = 1.0;
  double b = 0.0;
  double d = 0.5;
};

/// SDE parameters of the limiting diffusion.
///
/// OU:     dX = -tau (X - mu) dt + sqrt(2 tau sigma^2) dW,   (tau, mu, sigma)
/// Jacobi: dY = -gamma (Y - mu) dt + sqrt(2 gamma delta Y(1-Y)) dW,   (gamma, mu, delta)
/// CIR:    dZ = -theta (Z - mean) dt + sqrt(theta s Z) dW,   (theta, mean, s = 1/a)
///
/// Only sigma^2 enters any formula, so an OU chain with a < 0 gives a
/// negative sigma and the same law as |a|.
struct DiffusionParams {
  double drift_rate = 1.0;
  double mean = 0.0;
  double vol_scale = 1.0;
};

/// Open interval (lower, upper); infinite ends use +-infinity.
struct StateSpace {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  /// Closed state space (the finite endpoints belong to it).
  bool contains(double x) const { return x >= lower && x <= upper; }
  bool interior(double x) const { return x > lower && x < upper; }
};

StateSpace state_space(DiffusionKind kind);

void validate(DiffusionKind kind, const ChainParams& cp);
DiffusionParams derive_params(DiffusionKind kind, const ChainParams& cp);

/// A scalar test function with optional analytic derivatives. Missing
/// derivatives fall back to centered differences with
/// h = max(1e-5, 1e-5 |x|).
struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  double operator()(double x) const { return value(x); }
  double first(double x) const;
  double second(double x) const;
};

/// A Pearson diffusion with resolved SDE parameters. Value type; all
/// members are pure.
class Diffusion {
public:
  Diffusion(DiffusionKind kind, DiffusionParams params);
  static Diffusion from_chain(DiffusionKind kind, const ChainParams& cp);

  DiffusionKind kind() const { return kind_; }
  const DiffusionParams& params() const { return params_; }
  StateSpace space() const { return state_space(kind_); }

  double drift(double x) const;
  double diffusion_sq(double x) const;
  /// drift(x) f'(x) + diffusion_sq(x) f''(x) / 2
  double generator_apply(const TestFunction& f, double x) const;

  /// Normal(mu, sigma^2), Gamma(2 mean/s, rate 2/s) or Beta(mu/delta, (1-mu)/delta).
  double stationary_density(double x) const;
  double stationary_cdf(double x) const;
  double stationary_mean() const { return params_.mean; }
  double stationary_variance() const;

  /// Shape parameters of the stationary law: (mu, sigma^2) for OU,
  /// (shape, rate) for CIR, (p, q) for Jacobi.
  std::pair<double, double> stationary_shape() const;

private:
  void require_in_space(double x, const char* what) const;

  DiffusionKind kind_;
  DiffusionParams params_;
};

} // namespace fpdwalk
