#include "fpdwalk/pearson.hpp"

#include "fpdwalk/errors.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fpdwalk {

std::string_view to_string(DiffusionKind kind) {
  switch (kind) {
  case DiffusionKind::OU:
    return "ou";
  case DiffusionKind::CIR:
    return "cir";
  case DiffusionKind::Jacobi:
    return "jacobi";
  }
  return "?";
}

DiffusionKind parse_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ou")
    return DiffusionKind::OU;
  if (lower == "cir")
    return DiffusionKind::CIR;
  if (lower == "jacobi")
    return DiffusionKind::Jacobi;
  throw InvalidParameter("unknown diffusion kind '" + std::string(text) + "'");
}

StateSpace state_space(DiffusionKind kind) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
  case DiffusionKind::OU:
    return {-inf, inf};
  case DiffusionKind::CIR:
    return {0.0, inf};
  case DiffusionKind::Jacobi:
    return {0.0, 1.0};
  }
  return {};
}

void validate(DiffusionKind kind, const ChainParams& cp) {
  std::ostringstream err;
  if (!(cp.theta > 0.0) || !std::isfinite(cp.theta))
    err << "theta must be positive (got " << cp.theta << "); ";
  switch (kind) {
  case DiffusionKind::OU:
    if (cp.a == 0.0 || !std::isfinite(cp.a))
      err << "OU chain needs a != 0; ";
    if (!std::isfinite(cp.b))
      err << "OU chain needs finite b; ";
    break;
  case DiffusionKind::CIR:
    if (!(cp.d > 0.0 && cp.d < 1.0))
      err << "CIR chain needs 0 < d < 1 (got " << cp.d << "); ";
    [[fallthrough]];
  case DiffusionKind::Jacobi:
    if (!(cp.a > 0.0) || !std::isfinite(cp.a))
      err << "a must be positive (got " << cp.a << "); ";
    if (!(cp.b > 0.0) || !std::isfinite(cp.b))
      err << "b must be positive (got " << cp.b << "); ";
    break;
  }
  const std::string msg = err.str();
  if (!msg.empty())
    throw InvalidParameter(std::string(to_string(kind)) + ": " + msg.substr(0, msg.size() - 2));
}

DiffusionParams derive_params(DiffusionKind kind, const ChainParams& cp) {
  validate(kind, cp);
  switch (kind) {
  case DiffusionKind::OU:
    return {cp.theta, -cp.b / cp.a, 1.0 / (cp.a * std::numbers::sqrt2)};
  case DiffusionKind::Jacobi:
    return {cp.theta * (cp.a + cp.b), cp.b / (cp.a + cp.b), 1.0 / (2.0 * (cp.a + cp.b))};
  case DiffusionKind::CIR:
    return {cp.theta, cp.b / cp.a, 1.0 / cp.a};
  }
  return {};
}

namespace {

double fd_step(double x) { return std::max(1e-5, 1e-5 * std::abs(x)); }

} // namespace

double TestFunction::first(double x) const {
  if (d1)
    return d1(x);
  const double h = fd_step(x);
  return (value(x + h) - value(x - h)) / (2.0 * h);
}

double TestFunction::second(double x) const {
  if (d2)
    return d2(x);
  const double h = fd_step(x);
  return (value(x + h) - 2.0 * value(x) + value(x - h)) / (h * h);
}

Diffusion::Diffusion(DiffusionKind kind, DiffusionParams params) : kind_(kind), params_(params) {
  const auto& p = params_;
  if (!(p.drift_rate > 0.0) || !std::isfinite(p.drift_rate))
    throw InvalidParameter("drift rate must be positive");
  switch (kind_) {
  case DiffusionKind::OU:
    if (p.vol_scale == 0.0 || !std::isfinite(p.vol_scale) || !std::isfinite(p.mean))
      throw InvalidParameter("OU needs finite mean and nonzero sigma");
    break;
  case DiffusionKind::Jacobi:
    if (!(p.mean > 0.0 && p.mean < 1.0))
      throw InvalidParameter("Jacobi mean must lie in (0, 1)");
    if (!(p.vol_scale > 0.0))
      throw InvalidParameter("Jacobi delta must be positive");
    break;
  case DiffusionKind::CIR:
    if (!(p.mean > 0.0) || !(p.vol_scale > 0.0))
      throw InvalidParameter("CIR needs positive mean and scale");
    break;
  }
}

Diffusion Diffusion::from_chain(DiffusionKind kind, const ChainParams& cp) {
  return Diffusion(kind, derive_params(kind, cp));
}

void Diffusion::require_in_space(double x, const char* what) const {
  if (!space().contains(x) || std::isnan(x)) {
    std::ostringstream os;
    os << what << ": x = " << x << " outside the " << to_string(kind_) << " state space";
    throw DomainError(os.str());
  }
}

double Diffusion::drift(double x) const {
  require_in_space(x, "drift");
  return -params_.drift_rate * (x - params_.mean);
}

double Diffusion::diffusion_sq(double x) const {
  require_in_space(x, "diffusion_sq");
  const auto& p = params_;
  switch (kind_) {
  case DiffusionKind::OU:
    return 2.0 * p.drift_rate * p.vol_scale * p.vol_scale;
  case DiffusionKind::Jacobi:
    return 2.0 * p.drift_rate * p.vol_scale * x * (1.0 - x);
  case DiffusionKind::CIR:
    return p.drift_rate * p.vol_scale * x;
  }
  return 0.0;
}

double Diffusion::generator_apply(const TestFunction& f, double x) const {
  return drift(x) * f.first(x) + 0.5 * diffusion_sq(x) * f.second(x);
}

std::pair<double, double> Diffusion::stationary_shape() const {
  const auto& p = params_;
  switch (kind_) {
  case DiffusionKind::OU:
    return {p.mean, p.vol_scale * p.vol_scale};
  case DiffusionKind::CIR:
    return {2.0 * p.mean / p.vol_scale, 2.0 / p.vol_scale};
  case DiffusionKind::Jacobi:
    return {p.mean / p.vol_scale, (1.0 - p.mean) / p.vol_scale};
  }
  return {};
}

double Diffusion::stationary_variance() const {
  const auto [s1, s2] = stationary_shape();
  switch (kind_) {
  case DiffusionKind::OU:
    return s2;
  case DiffusionKind::CIR:
    return s1 / (s2 * s2);
  case DiffusionKind::Jacobi:
    return s1 * s2 / ((s1 + s2) * (s1 + s2) * (s1 + s2 + 1.0));
  }
  return 0.0;
}

double Diffusion::stationary_density(double x) const {
  if (!space().interior(x)) {
    std::ostringstream os;
    os << "stationary_density: x = " << x << " not interior to the " << to_string(kind_)
       << " state space";
    throw DomainError(os.str());
  }
  const auto [s1, s2] = stationary_shape();
  switch (kind_) {
  case DiffusionKind::OU: {
    const double u = (x - s1) / std::sqrt(s2);
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi * s2);
  }
  case DiffusionKind::CIR:
    return std::exp(s1 * std::log(s2) + (s1 - 1.0) * std::log(x) - s2 * x - std::lgamma(s1));
  case DiffusionKind::Jacobi:
    return std::exp((s1 - 1.0) * std::log(x) + (s2 - 1.0) * std::log1p(-x) -
                    std::log(boost::math::beta(s1, s2)));
  }
  return 0.0;
}

double Diffusion::stationary_cdf(double x) const {
  const StateSpace ss = space();
  if (x <= ss.lower)
    return 0.0;
  if (x >= ss.upper)
    return 1.0;
  const auto [s1, s2] = stationary_shape();
  switch (kind_) {
  case DiffusionKind::OU:
    return 0.5 * std::erfc(-(x - s1) / std::sqrt(2.0 * s2));
  case DiffusionKind::CIR:
    return boost::math::gamma_p(s1, s2 * x);
  case DiffusionKind::Jacobi:
    return boost::math::ibeta(s1, s2, x);
  }
  return 0.0;
}

} // namespace fpdwalk
