#include "fpdwalk/heavy_tails.hpp"

#include "fpdwalk/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace fpdwalk {

StabilityIndex::StabilityIndex(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    std::ostringstream os;
    os << "stability index must satisfy 0 < beta < 1 (got " << beta << ")";
    throw InvalidParameter(os.str());
  }
}

// Kanter's representation: with U ~ Uniform(0, pi) and W ~ Exp(1),
//   S = sin(bU) / sin(U)^(1/b) * (sin((1-b)U) / W)^((1-b)/b)
// has E[exp(-sS)] = exp(-s^b).
double sample_standard_stable(StabilityIndex beta, Rng& rng) {
  const double b = beta.value();
  const double u = std::numbers::pi * uniform_open(rng);
  const double w = exponential1(rng);
  const double log_s = std::log(std::sin(b * u)) - std::log(std::sin(u)) / b +
                       (1.0 - b) / b * (std::log(std::sin((1.0 - b) * u)) - std::log(w));
  return std::exp(log_s);
}

double sample_stable_subordinator_increment(StabilityIndex beta, double dt, Rng& rng) {
  if (!(dt > 0.0))
    throw InvalidParameter("subordinator increment needs dt > 0");
  return std::pow(dt, 1.0 / beta.value()) * sample_standard_stable(beta, rng);
}

std::string_view to_string(WaitingLaw law) {
  switch (law) {
  case WaitingLaw::Pareto:
    return "pareto";
  case WaitingLaw::PositiveStable:
    return "stable";
  case WaitingLaw::Deterministic:
    return "deterministic";
  }
  return "?";
}

WaitingLaw parse_waiting_law(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "pareto")
    return WaitingLaw::Pareto;
  if (lower == "stable" || lower == "positive_stable")
    return WaitingLaw::PositiveStable;
  if (lower == "deterministic")
    return WaitingLaw::Deterministic;
  throw InvalidParameter("unknown waiting-time law '" + std::string(text) + "'");
}

void WaitingTimeModel::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidParameter("waiting-time scale must be positive");
  if (law == WaitingLaw::Deterministic) {
    if (!(beta > 0.0 && beta <= 1.0))
      throw InvalidParameter("deterministic waiting times need 0 < beta <= 1");
    return;
  }
  StabilityIndex{beta};
}

double WaitingTimeModel::pareto_t0() const {
  return scale * std::pow(std::tgamma(1.0 - beta), -1.0 / beta);
}

double WaitingTimeModel::draw(Rng& rng) const {
  switch (law) {
  case WaitingLaw::Pareto:
    return pareto_t0() * std::pow(uniform_open(rng), -1.0 / beta);
  case WaitingLaw::PositiveStable:
    return scale * sample_standard_stable(StabilityIndex{beta}, rng);
  case WaitingLaw::Deterministic:
    return scale;
  }
  return scale;
}

SubordinatorPath simulate_subordinator(StabilityIndex beta, double grid_step, double cover,
                                       Rng& rng) {
  if (!(grid_step > 0.0))
    throw InvalidParameter("subordinator grid step must be positive");
  SubordinatorPath path;
  path.grid_step = grid_step;
  path.values.push_back(0.0);
  const double scale = std::pow(grid_step, 1.0 / beta.value());
  while (path.values.back() <= cover)
    path.values.push_back(path.values.back() + scale * sample_standard_stable(beta, rng));
  return path;
}

double inverse_subordinator(const SubordinatorPath& path, double t) {
  if (path.values.empty())
    throw PathTooShort("inverse_subordinator: empty path", t);
  if (!(t >= 0.0))
    throw InvalidParameter("inverse_subordinator needs t >= 0");
  if (path.values.back() <= t) {
    std::ostringstream os;
    os << "inverse_subordinator: path ends at D = " << path.values.back() << " <= t = " << t;
    throw PathTooShort(os.str(), t - path.values.back());
  }
  const auto it = std::upper_bound(path.values.begin(), path.values.end(), t);
  return path.grid_step * static_cast<double>(it - path.values.begin());
}

RenewalSample sample_waiting_times(const WaitingTimeModel& model, std::size_t count, Rng& rng) {
  model.validate();
  if (count < 1)
    throw InvalidParameter("sample_waiting_times needs count >= 1");
  RenewalSample sample;
  sample.partial_sums.reserve(count + 1);
  for (std::size_t r = 0; r < count; ++r)
    sample.partial_sums.push_back(sample.partial_sums.back() + model.draw(rng));
  sample.horizon = sample.partial_sums.back();
  return sample;
}

void extend_renewal(RenewalSample& sample, const WaitingTimeModel& model, double t, Rng& rng) {
  if (sample.partial_sums.empty())
    sample.partial_sums.push_back(0.0);
  while (sample.partial_sums.back() <= t)
    sample.partial_sums.push_back(sample.partial_sums.back() + model.draw(rng));
  sample.horizon = sample.partial_sums.back();
}

std::size_t renewal_count(const RenewalSample& sample, double t) {
  if (!(t >= 0.0))
    throw InvalidParameter("renewal_count needs t >= 0");
  if (t > sample.horizon) {
    std::ostringstream os;
    os << "renewal_count: t = " << t << " beyond sample horizon " << sample.horizon;
    throw HorizonExceeded(os.str());
  }
  const auto it = std::upper_bound(sample.partial_sums.begin(), sample.partial_sums.end(), t);
  return static_cast<std::size_t>(it - sample.partial_sums.begin()) - 1;
}

void write_subordinator_csv(std::ostream& os, const SubordinatorPath& path) {
  os << "grid_time,value\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < path.values.size(); ++k)
    os << static_cast<double>(k) * path.grid_step << ',' << path.values[k] << '\n';
  os.precision(old);
}

void write_renewal_csv(std::ostream& os, const RenewalSample& sample) {
  os << "index,partial_sum\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < sample.partial_sums.size(); ++r)
    os << r << ',' << sample.partial_sums[r] << '\n';
  os.precision(old);
}

} // namespace fpdwalk
