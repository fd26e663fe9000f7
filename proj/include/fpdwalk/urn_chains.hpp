#pragma once

#include "fpdwalk/pearson.hpp"
#include "fpdwalk/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fpdwalk {

// ---------------------------------------------------------------------------
// Bernoulli-Laplace urn: two urns of n balls, n of the 2n balls white. State
// is the number of white balls in urn A; each draw swaps one ball each way.
// ---------------------------------------------------------------------------

struct ThreePointLaw {
  double up = 0.0;
  double stay = 0.0;
  double down = 0.0;
};

/// p(i,i+1) = (1 - i/n)^2, p(i,i) = 2 (i/n)(1 - i/n), p(i,i-1) = (i/n)^2.
ThreePointLaw bl_transition_probs(int n, int i);
int bl_step(int n, int i, Rng& rng);

/// pi_i = C(n,i) C(n,n-i) / C(2n,n), evaluated in log space.
std::vector<double> bl_stationary(int n);

// ---------------------------------------------------------------------------
// Wright-Fisher chain with mutation rates alpha = a/n^d, beta = b/n and
// selection s. d = 1 is the Jacobi regime, 0 < d < 1 the CIR regime.
// ---------------------------------------------------------------------------

class WrightFisherChain {
public:
  WrightFisherChain(int n, int state, double mutation_a, double mutation_b,
                    double exponent_d = 1.0, double selection_s = 0.0);

  int n() const { return n_; }
  int state() const { return state_; }
  void set_state(int state);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double selection() const { return s_; }

  /// Expected fraction of mature A-types for i A-types in the parent
  /// generation, general form with selection.
  double success_prob(int i) const;
  /// Specialized form i/n (1 - alpha) + (1 - i/n) beta (valid when s = 0).
  double success_prob_no_selection(int i) const;

  /// Draws the next generation ~ Binomial(n, p_state) and returns it.
  int step(Rng& rng);

private:
  int n_;
  int state_;
  double alpha_;
  double beta_;
  double s_;
};

/// p_i of the chain's current state.
double wf_success_prob(const WrightFisherChain& chain);

/// Binomial(n, p) probability row, normalized; sums to 1 up to rounding.
std::vector<double> binomial_pmf(int n, double p);
/// Inverse CDF for n <= 64, rejection sampling above.
int sample_binomial(int n, double p, Rng& rng);

// ---------------------------------------------------------------------------
// Rescaled chains H^(n) and their time changes.
// ---------------------------------------------------------------------------

/// Integer chain of size n seen on the diffusion's scale:
///   OU:     H = (2Z - n - b sqrt(n)) / (a sqrt(n))
///   Jacobi: H = G / n
///   CIR:    H = G / n^d
class RescaledChainView {
public:
  RescaledChainView(DiffusionKind kind, const ChainParams& cp, int n);

  DiffusionKind kind() const { return kind_; }
  const ChainParams& params() const { return cp_; }
  int n() const { return n_; }

  double rescale(int state) const;
  /// Floor embedding of a diffusion-scale point into {0, ..., n}.
  int initial_state(double x0) const;
  /// Upper bound on |rescale(initial_state(x0)) - x0|.
  double grid_pitch() const;
  /// Chain steps per unit of diffusion time: theta n/2, theta n, (theta/a) n^d.
  double time_scale() const;

  ThreePointLaw bl_law(int state) const { return bl_transition_probs(n_, state); }
  /// Success probability of the Wright-Fisher row (Jacobi/CIR only).
  double wf_prob(int state) const;
  int step(int state, Rng& rng) const;

  /// A_n f(x'_n) with x'_n the rescaled floor embedding of x. Expectations
  /// are exact sums over the one-step law.
  double discrete_generator_apply(const TestFunction& f, double x) const;

private:
  DiffusionKind kind_;
  ChainParams cp_;
  int n_;
  double sqrt_n_;
  double n_pow_d_;
  double alpha_;
  double beta_;
};

struct ChainPath {
  std::vector<int> states;
  std::vector<double> rescaled;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

ChainPath start_path(const RescaledChainView& view, double x0);
/// Appends steps until the path has at least `steps` transitions.
void extend_path(const RescaledChainView& view, ChainPath& path, std::size_t steps, Rng& rng);
ChainPath simulate_chain(const RescaledChainView& view, double x0, std::size_t steps, Rng& rng);

/// rescaled[floor(time_scale * t)]; throws PathExhausted carrying the
/// number of steps required.
double time_changed_value(const RescaledChainView& view, const ChainPath& path, double t);
std::size_t time_changed_index(const RescaledChainView& view, double t);

/// CSV with columns step,raw_state,rescaled_state.
void write_path_csv(std::ostream& os, const ChainPath& path);

} // namespace fpdwalk
