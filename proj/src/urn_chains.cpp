#include "fpdwalk/urn_chains.hpp"

#include "fpdwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace fpdwalk {

namespace {

void require_state(int n, int i, const char* what) {
  if (n < 1) {
    std::ostringstream os;
    os << what << ": chain size n = " << n << " must be positive";
    throw RangeError(os.str());
  }
  if (i < 0 || i > n) {
    std::ostringstream os;
    os << what << ": state " << i << " outside {0, ..., " << n << "}";
    throw RangeError(os.str());
  }
}

// Both forms of p_i must land in [0, 1]; outside means n is too small for
// the mutation rates.
double checked_prob(double p, int n, int i) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "success probability " << p << " at state " << i << " outside [0, 1]; n = " << n
       << " is too small for the mutation rates";
    throw InvalidParameter(os.str());
  }
  return p;
}

} // namespace

ThreePointLaw bl_transition_probs(int n, int i) {
  require_state(n, i, "bl_transition_probs");
  const double q = static_cast<double>(i) / n;
  const double r = 1.0 - q;
  return {r * r, 2.0 * q * r, q * q};
}

int bl_step(int n, int i, Rng& rng) {
  const ThreePointLaw law = bl_transition_probs(n, i);
  const double u = uniform_open(rng);
  if (u < law.up)
    return i + 1;
  if (u < law.up + law.stay)
    return i;
  return i - 1;
}

std::vector<double> bl_stationary(int n) {
  require_state(n, 0, "bl_stationary");
  auto log_choose = [](int m, int k) {
    return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
  };
  const double log_norm = log_choose(2 * n, n);
  std::vector<double> pi(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    pi[i] = std::exp(2.0 * log_choose(n, i) - log_norm);
  return pi;
}

WrightFisherChain::WrightFisherChain(int n, int state, double mutation_a, double mutation_b,
                                     double exponent_d, double selection_s)
    : n_(n), state_(state), s_(selection_s) {
  require_state(n, state, "WrightFisherChain");
  if (!(mutation_a > 0.0) || !(mutation_b > 0.0))
    throw InvalidParameter("Wright-Fisher mutation parameters a, b must be positive");
  if (!(exponent_d > 0.0 && exponent_d <= 1.0))
    throw InvalidParameter("Wright-Fisher exponent d must lie in (0, 1]");
  if (!(selection_s >= 0.0 && selection_s <= 1.0))
    throw InvalidParameter("Wright-Fisher selection s must lie in [0, 1]");
  alpha_ = mutation_a / std::pow(static_cast<double>(n), exponent_d);
  beta_ = mutation_b / n;
  if (alpha_ > 1.0 || beta_ > 1.0) {
    std::ostringstream os;
    os << "mutation probabilities alpha = " << alpha_ << ", beta = " << beta_
       << " exceed 1; n = " << n << " is too small";
    throw InvalidParameter(os.str());
  }
}

void WrightFisherChain::set_state(int state) {
  require_state(n_, state, "WrightFisherChain::set_state");
  state_ = state;
}

double WrightFisherChain::success_prob(int i) const {
  require_state(n_, i, "wf_success_prob");
  const double mature_a = (1.0 + s_) * (i * (1.0 - alpha_) + (n_ - i) * beta_);
  const double mature_other = i * alpha_ + (n_ - i) * (1.0 - beta_);
  return checked_prob(mature_a / (mature_a + mature_other), n_, i);
}

double WrightFisherChain::success_prob_no_selection(int i) const {
  require_state(n_, i, "wf_success_prob");
  const double frac = static_cast<double>(i) / n_;
  return checked_prob(frac * (1.0 - alpha_) + (1.0 - frac) * beta_, n_, i);
}

int WrightFisherChain::step(Rng& rng) {
  state_ = sample_binomial(n_, success_prob(state_), rng);
  return state_;
}

double wf_success_prob(const WrightFisherChain& chain) { return chain.success_prob(chain.state()); }

std::vector<double> binomial_pmf(int n, double p) {
  if (n < 0)
    throw RangeError("binomial_pmf: negative n");
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameter("binomial_pmf: p outside [0, 1]");
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0) {
    w.front() = 1.0;
    return w;
  }
  if (p == 1.0) {
    w.back() = 1.0;
    return w;
  }
  // Ratio recurrence outward from the mode keeps every term representable
  // near the bulk; far tails underflow to zero.
  const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
  const double odds = p / (1.0 - p);
  w[mode] = 1.0;
  for (int j = mode; j < n; ++j) {
    w[j + 1] = w[j] * (static_cast<double>(n - j) / (j + 1)) * odds;
    if (w[j + 1] == 0.0)
      break;
  }
  for (int j = mode; j > 0; --j) {
    w[j - 1] = w[j] * (static_cast<double>(j) / (n - j + 1)) / odds;
    if (w[j - 1] == 0.0)
      break;
  }
  double total = 0.0;
  for (double v : w)
    total += v;
  for (double& v : w)
    v /= total;
  return w;
}

int sample_binomial(int n, double p, Rng& rng) {
  if (n < 0)
    throw RangeError("sample_binomial: negative n");
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameter("sample_binomial: p outside [0, 1]");
  if (p == 0.0 || n == 0)
    return 0;
  if (p == 1.0)
    return n;
  if (n > 64) {
    std::binomial_distribution<int> dist(n, p);
    return dist(rng);
  }
  if (p > 0.5)
    return n - sample_binomial(n, 1.0 - p, rng);
  // Sequential inversion from j = 0.
  const double odds = p / (1.0 - p);
  double term = std::pow(1.0 - p, n);
  double cdf = term;
  const double u = uniform_open(rng);
  int j = 0;
  while (u > cdf && j < n) {
    term *= odds * static_cast<double>(n - j) / (j + 1);
    ++j;
    cdf += term;
  }
  return j;
}

RescaledChainView::RescaledChainView(DiffusionKind kind, const ChainParams& cp, int n)
    : kind_(kind), cp_(cp), n_(n) {
  validate(kind, cp);
  if (n < 1)
    throw InvalidParameter("chain size n must be positive");
  sqrt_n_ = std::sqrt(static_cast<double>(n));
  n_pow_d_ = kind == DiffusionKind::CIR ? std::pow(static_cast<double>(n), cp.d) : n;
  alpha_ = beta_ = 0.0;
  if (kind != DiffusionKind::OU) {
    alpha_ = cp.a / n_pow_d_;
    beta_ = cp.b / n;
    if (alpha_ > 1.0 || beta_ > 1.0) {
      std::ostringstream os;
      os << "n = " << n << " too small: mutation probabilities alpha = " << alpha_
         << ", beta = " << beta_;
      throw InvalidParameter(os.str());
    }
  }
}

double RescaledChainView::rescale(int state) const {
  switch (kind_) {
  case DiffusionKind::OU:
    return (2.0 * state - n_ - cp_.b * sqrt_n_) / (cp_.a * sqrt_n_);
  case DiffusionKind::Jacobi:
    return static_cast<double>(state) / n_;
  case DiffusionKind::CIR:
    return state / n_pow_d_;
  }
  return 0.0;
}

int RescaledChainView::initial_state(double x0) const {
  if (!state_space(kind_).contains(x0) || !std::isfinite(x0)) {
    std::ostringstream os;
    os << "initial_state: x0 = " << x0 << " outside the " << to_string(kind_) << " state space";
    throw DomainError(os.str());
  }
  double scaled = 0.0;
  switch (kind_) {
  case DiffusionKind::OU:
    scaled = 0.5 * (n_ + (cp_.a * x0 + cp_.b) * sqrt_n_);
    break;
  case DiffusionKind::Jacobi:
    scaled = n_ * x0;
    break;
  case DiffusionKind::CIR:
    scaled = n_pow_d_ * x0;
    break;
  }
  const double index = std::floor(scaled);
  if (index < 0.0 || index > n_) {
    std::ostringstream os;
    os << "initial_state: x0 = " << x0 << " embeds to index " << index << " outside {0, ..., "
       << n_ << "}; increase n";
    throw EmbeddingOutOfRange(os.str(), static_cast<long>(std::clamp(index, -1e18, 1e18)));
  }
  return static_cast<int>(index);
}

double RescaledChainView::grid_pitch() const {
  switch (kind_) {
  case DiffusionKind::OU:
    return 2.0 / (std::abs(cp_.a) * sqrt_n_);
  case DiffusionKind::Jacobi:
    return 1.0 / n_;
  case DiffusionKind::CIR:
    return 1.0 / n_pow_d_;
  }
  return 0.0;
}

double RescaledChainView::time_scale() const {
  switch (kind_) {
  case DiffusionKind::OU:
    return 0.5 * cp_.theta * n_;
  case DiffusionKind::Jacobi:
    return cp_.theta * n_;
  case DiffusionKind::CIR:
    return cp_.theta / cp_.a * n_pow_d_;
  }
  return 0.0;
}

double RescaledChainView::wf_prob(int state) const {
  if (kind_ == DiffusionKind::OU)
    throw InvalidParameter("wf_prob: the OU chain is not a Wright-Fisher chain");
  require_state(n_, state, "wf_prob");
  const double frac = static_cast<double>(state) / n_;
  return checked_prob(frac * (1.0 - alpha_) + (1.0 - frac) * beta_, n_, state);
}

int RescaledChainView::step(int state, Rng& rng) const {
  if (kind_ == DiffusionKind::OU)
    return bl_step(n_, state, rng);
  return sample_binomial(n_, wf_prob(state), rng);
}

double RescaledChainView::discrete_generator_apply(const TestFunction& f, double x) const {
  const int i = initial_state(x);
  const double f0 = f(rescale(i));
  double acc = 0.0;
  if (kind_ == DiffusionKind::OU) {
    const ThreePointLaw law = bl_law(i);
    if (law.up > 0.0)
      acc += law.up * (f(rescale(i + 1)) - f0);
    if (law.down > 0.0)
      acc += law.down * (f(rescale(i - 1)) - f0);
  } else {
    const std::vector<double> row = binomial_pmf(n_, wf_prob(i));
    for (int j = 0; j <= n_; ++j) {
      if (row[j] != 0.0 && j != i)
        acc += row[j] * (f(rescale(j)) - f0);
    }
  }
  return time_scale() * acc;
}

ChainPath start_path(const RescaledChainView& view, double x0) {
  const int i0 = view.initial_state(x0);
  ChainPath path;
  path.states.push_back(i0);
  path.rescaled.push_back(view.rescale(i0));
  return path;
}

void extend_path(const RescaledChainView& view, ChainPath& path, std::size_t steps, Rng& rng) {
  if (path.states.empty())
    throw InvalidParameter("extend_path: path has no initial state");
  path.states.reserve(steps + 1);
  path.rescaled.reserve(steps + 1);
  while (path.steps() < steps) {
    const int next = view.step(path.states.back(), rng);
    path.states.push_back(next);
    path.rescaled.push_back(view.rescale(next));
  }
}

ChainPath simulate_chain(const RescaledChainView& view, double x0, std::size_t steps, Rng& rng) {
  ChainPath path = start_path(view, x0);
  extend_path(view, path, steps, rng);
  return path;
}

std::size_t time_changed_index(const RescaledChainView& view, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw InvalidParameter("time change needs a finite nonnegative time");
  return static_cast<std::size_t>(std::floor(view.time_scale() * t));
}

double time_changed_value(const RescaledChainView& view, const ChainPath& path, double t) {
  const std::size_t index = time_changed_index(view, t);
  if (path.states.empty() || index > path.steps()) {
    std::ostringstream os;
    os << "time_changed_value: t = " << t << " needs " << index << " steps, path has "
       << path.steps();
    throw PathExhausted(os.str(), index);
  }
  return path.rescaled[index];
}

void write_path_csv(std::ostream& os, const ChainPath& path) {
  os << "step,raw_state,rescaled_state\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < path.states.size(); ++r)
    os << r << ',' << path.states[r] << ',' << path.rescaled[r] << '\n';
  os.precision(old);
}

} // namespace fpdwalk
