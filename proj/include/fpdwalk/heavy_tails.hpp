#pragma once

#include "fpdwalk/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace fpdwalk {

/// Stability index 0 < beta < 1.
class StabilityIndex {
public:
  explicit StabilityIndex(double beta);
  double value() const { return beta_; }
  operator double() const { return beta_; }

private:
  double beta_;
};

/// Standard positive stable variate S with E[exp(-s S)] = exp(-s^beta).
double sample_standard_stable(StabilityIndex beta, Rng& rng);
/// Increment D(t + dt) - D(t) of the standard beta-stable subordinator.
double sample_stable_subordinator_increment(StabilityIndex beta, double dt, Rng& rng);

enum class WaitingLaw {
  /// P(G > t) = (t/t0)^(-beta), t >= t0, t0 = Gamma(1 - beta)^(-1/beta).
  Pareto,
  /// G equal in law to the standard stable S.
  PositiveStable,
  /// G = scale exactly; the beta = 1 reduction (no heavy tail).
  Deterministic,
};

std::string_view to_string(WaitingLaw law);
WaitingLaw parse_waiting_law(std::string_view text);

/// I.i.d. waiting-time law. With scale = 1 the Pareto and stable laws are
/// calibrated so that n^(-1/beta) (G_1 + ... + G_n) converges to the
/// standard D_1.
struct WaitingTimeModel {
  double beta = 0.7;
  double scale = 1.0;
  WaitingLaw law = WaitingLaw::Pareto;

  void validate() const;
  double pareto_t0() const;
  double draw(Rng& rng) const;
};

struct SubordinatorPath {
  double grid_step = 1e-3;
  /// D(0) = 0, D(h), D(2h), ...
  std::vector<double> values;
};

/// Simulates on the grid k h until the path first exceeds `cover`.
SubordinatorPath simulate_subordinator(StabilityIndex beta, double grid_step, double cover,
                                       Rng& rng);

/// h min{k : D(kh) > t}; the true E_t lies in [x* - h, x*].
double inverse_subordinator(const SubordinatorPath& path, double t);

struct RenewalSample {
  /// T_0 = 0, T_1, ..., T_count.
  std::vector<double> partial_sums{0.0};
  /// N_t is exact for t <= horizon (the last partial sum).
  double horizon = 0.0;

  std::size_t count() const { return partial_sums.size() - 1; }
};

RenewalSample sample_waiting_times(const WaitingTimeModel& model, std::size_t count, Rng& rng);
/// Draws further waiting times until the last partial sum exceeds t.
void extend_renewal(RenewalSample& sample, const WaitingTimeModel& model, double t, Rng& rng);
/// N_t = max{r >= 0 : T_r <= t}.
std::size_t renewal_count(const RenewalSample& sample, double t);

/// CSV grid_time,value.
void write_subordinator_csv(std::ostream& os, const SubordinatorPath& path);
/// CSV index,partial_sum.
void write_renewal_csv(std::ostream& os, const RenewalSample& sample);

} // namespace fpdwalk
