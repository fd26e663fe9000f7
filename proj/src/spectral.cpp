#include "fpdwalk/spectral.hpp"

#include "fpdwalk/errors.hpp"
#include "fpdwalk/mittag_leffler.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace fpdwalk {

namespace {

// q_0..q_{len-1} at x, in type T.
template <typename T>
void recurrence_values(const OrthonormalPolynomials& p, T x, T* out, std::size_t len) {
  if (len == 0)
    return;
  out[0] = 1;
  if (len == 1)
    return;
  out[1] = (x - static_cast<T>(p.a(0))) / static_cast<T>(p.b(1));
  for (std::size_t n = 1; n + 1 < len; ++n) {
    const int k = static_cast<int>(n);
    out[n + 1] = ((x - static_cast<T>(p.a(k))) * out[n] - static_cast<T>(p.b(k)) * out[n - 1]) /
                 static_cast<T>(p.b(k + 1));
  }
}

template <typename T>
void recurrence_derivs(const OrthonormalPolynomials& p, T x, T* v, T* d1, T* d2, std::size_t len) {
  if (len == 0)
    return;
  v[0] = 1;
  d1[0] = 0;
  d2[0] = 0;
  if (len == 1)
    return;
  const T inv_b1 = 1 / static_cast<T>(p.b(1));
  v[1] = (x - static_cast<T>(p.a(0))) * inv_b1;
  d1[1] = inv_b1;
  d2[1] = 0;
  for (std::size_t n = 1; n + 1 < len; ++n) {
    const int k = static_cast<int>(n);
    const T shift = x - static_cast<T>(p.a(k));
    const T bn = static_cast<T>(p.b(k));
    const T inv = 1 / static_cast<T>(p.b(k + 1));
    v[n + 1] = (shift * v[n] - bn * v[n - 1]) * inv;
    d1[n + 1] = (v[n] + shift * d1[n] - bn * d1[n - 1]) * inv;
    d2[n + 1] = (2 * d1[n] + shift * d2[n] - bn * d2[n - 1]) * inv;
  }
}

} // namespace

OrthonormalPolynomials::OrthonormalPolynomials(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty() || a_.size() != b_.size())
    throw InvalidParameter("recurrence tables must be non-empty and of equal length");
  for (std::size_t n = 1; n < b_.size(); ++n)
    if (!(b_[n] > 0.0) || !std::isfinite(b_[n]))
      throw NumericalDegeneracy("recurrence coefficient b_n must be positive and finite");
}

OrthonormalPolynomials OrthonormalPolynomials::for_diffusion(const Diffusion& diffusion,
                                                             int max_degree) {
  if (max_degree < 0)
    throw InvalidParameter("polynomial degree must be >= 0");
  const std::size_t len = static_cast<std::size_t>(max_degree) + 1;
  std::vector<double> a(len, 0.0);
  std::vector<double> b(len, 0.0);
  const auto [s1, s2] = diffusion.stationary_shape();
  switch (diffusion.kind()) {
  case DiffusionKind::OU: {
    // Hermite in u = (x - mu) / sd.
    const double sd = std::sqrt(s2);
    for (std::size_t n = 0; n < len; ++n) {
      a[n] = s1;
      b[n] = sd * std::sqrt(static_cast<double>(n));
    }
    break;
  }
  case DiffusionKind::CIR: {
    // Laguerre with alpha = shape - 1 in u = rate x.
    const double shape = s1;
    const double rate = s2;
    for (std::size_t n = 0; n < len; ++n) {
      const double nn = static_cast<double>(n);
      a[n] = (2.0 * nn + shape) / rate;
      b[n] = std::sqrt(nn * (nn + shape - 1.0)) / rate;
    }
    break;
  }
  case DiffusionKind::Jacobi: {
    // Beta(p, q) on (0, 1) is the Jacobi weight (1-u)^(q-1) (1+u)^(p-1)
    // on u = 2y - 1.
    const double al = s2 - 1.0;
    const double be = s1 - 1.0;
    const double sum = al + be;
    for (std::size_t n = 0; n < len; ++n) {
      const double nn = static_cast<double>(n);
      double au;
      if (n == 0)
        au = (be - al) / (sum + 2.0);
      else
        au = (be * be - al * al) / ((2.0 * nn + sum) * (2.0 * nn + sum + 2.0));
      a[n] = 0.5 * (1.0 + au);
      if (n == 0)
        continue;
      double bu2;
      if (n == 1)
        bu2 = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + sum) * (2.0 + sum) * (3.0 + sum));
      else {
        const double s = 2.0 * nn + sum;
        bu2 = 4.0 * nn * (nn + al) * (nn + be) * (nn + sum) / (s * s * (s + 1.0) * (s - 1.0));
      }
      b[n] = 0.5 * std::sqrt(bu2);
    }
    break;
  }
  }
  return OrthonormalPolynomials(std::move(a), std::move(b));
}

void OrthonormalPolynomials::evaluate(double x, std::span<double> values) const {
  if (values.size() > a_.size())
    throw InvalidParameter("requested degree exceeds the recurrence table");
  recurrence_values<double>(*this, x, values.data(), values.size());
}

void OrthonormalPolynomials::evaluate(double x, std::span<double> values, std::span<double> d1,
                                      std::span<double> d2) const {
  if (values.size() > a_.size())
    throw InvalidParameter("requested degree exceeds the recurrence table");
  if (d1.size() != values.size() || d2.size() != values.size())
    throw InvalidParameter("derivative buffers must match the value buffer");
  recurrence_derivs<double>(*this, x, values.data(), d1.data(), d2.data(), values.size());
}

namespace {

struct WideRule {
  std::vector<long double> nodes;
  std::vector<long double> weights;
};

// Weights of far nodes can underflow double while the polynomials there
// overflow it, so the rule is kept in long double.
WideRule wide_gauss_rule(const OrthonormalPolynomials& polys, int count) {
  if (count < 1)
    throw InvalidParameter("Gauss rule needs at least one node");
  if (polys.max_degree() < count)
    throw InvalidParameter("Gauss rule needs the recurrence up to degree `count`");
  const auto m = static_cast<Eigen::Index>(count);
  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index i = 0; i < m; ++i)
    diag(i) = polys.a(static_cast<int>(i));
  for (Eigen::Index i = 0; i + 1 < m; ++i)
    sub(i) = polys.b(static_cast<int>(i) + 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalDegeneracy("Gauss rule: tridiagonal eigensolver failed");

  WideRule rule;
  const auto len = static_cast<std::size_t>(count) + 1;
  std::vector<long double> v(len), d1(len), d2(len);
  for (Eigen::Index i = 0; i < m; ++i) {
    long double x = solver.eigenvalues()(i);
    // Newton on q_count.
    for (int it = 0; it < 3; ++it) {
      recurrence_derivs<long double>(polys, x, v.data(), d1.data(), d2.data(), len);
      const long double step = v[len - 1] / d1[len - 1];
      if (!std::isfinite(step))
        break;
      x -= step;
      if (std::abs(step) <= 1e-18L * (1.0L + std::abs(x)))
        break;
    }
    recurrence_values<long double>(polys, x, v.data(), len - 1);
    long double sum = 0.0L;
    for (std::size_t j = 0; j + 1 < len; ++j)
      sum += v[j] * v[j];
    rule.nodes.push_back(x);
    rule.weights.push_back(1.0L / sum);
  }
  return rule;
}

} // namespace

GaussRule gauss_rule(const OrthonormalPolynomials& polys, int count) {
  const WideRule wide = wide_gauss_rule(polys, count);
  GaussRule rule;
  for (std::size_t k = 0; k < wide.nodes.size(); ++k) {
    rule.nodes.push_back(static_cast<double>(wide.nodes[k]));
    rule.weights.push_back(static_cast<double>(wide.weights[k]));
  }
  return rule;
}

double candidate_eigenvalue(const Diffusion& diffusion, int n) {
  const auto& p = diffusion.params();
  const double nn = static_cast<double>(n);
  switch (diffusion.kind()) {
  case DiffusionKind::OU:
  case DiffusionKind::CIR:
    return nn * p.drift_rate;
  case DiffusionKind::Jacobi:
    return p.drift_rate * nn * (1.0 + p.vol_scale * (nn - 1.0));
  }
  return 0.0;
}

EigenSystem::EigenSystem(const Diffusion& diffusion, int order, int quadrature_nodes)
    : diffusion_(diffusion), order_(order),
      polys_(OrthonormalPolynomials::for_diffusion(
          diffusion, std::max(order, std::max(quadrature_nodes, order + 1)) + 1)) {
  if (order < 0)
    throw InvalidParameter("eigen system order must be >= 0");
  const int nodes = std::max(quadrature_nodes, order + 1);
  const WideRule wide = wide_gauss_rule(polys_, nodes);
  for (std::size_t k = 0; k < wide.nodes.size(); ++k) {
    rule_.nodes.push_back(static_cast<double>(wide.nodes[k]));
    rule_.weights.push_back(static_cast<double>(wide.weights[k]));
  }

  const auto len = static_cast<std::size_t>(order) + 1;
  std::vector<long double> v(len), d1(len), d2(len);
  std::vector<long double> gram(len * len, 0.0L);
  std::vector<long double> rayleigh(len, 0.0L);
  for (std::size_t k = 0; k < wide.nodes.size(); ++k) {
    const long double x = wide.nodes[k];
    const long double w = wide.weights[k];
    if (w == 0.0L || !diffusion_.space().interior(static_cast<double>(x)))
      continue;
    recurrence_derivs<long double>(polys_, x, v.data(), d1.data(), d2.data(), len);
    const long double mu = diffusion_.drift(static_cast<double>(x));
    const long double s2 = diffusion_.diffusion_sq(static_cast<double>(x));
    for (std::size_t i = 0; i < len; ++i) {
      const long double wi = w * v[i];
      for (std::size_t j = 0; j <= i; ++j)
        gram[i * len + j] += wi * v[j];
      rayleigh[i] -= wi * (mu * d1[i] + 0.5L * s2 * d2[i]);
    }
  }
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double dev = std::abs(static_cast<double>(gram[i * len + j]) - (i == j ? 1.0 : 0.0));
      if (!std::isfinite(dev))
        gram_deviation_ = std::numeric_limits<double>::infinity();
      else
        gram_deviation_ = std::max(gram_deviation_, dev);
    }
  if (!(gram_deviation_ <= kGramTolerance)) {
    std::ostringstream os;
    os << "eigen system: Gram matrix deviates from identity by " << gram_deviation_
       << " (order " << order << ", " << nodes << " nodes)";
    throw NumericalDegeneracy(os.str());
  }
  eigenvalues_.resize(len);
  candidates_.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    eigenvalues_[n] = static_cast<double>(rayleigh[n]);
    candidates_[n] = candidate_eigenvalue(diffusion_, static_cast<int>(n));
  }
  eigenvalues_[0] = 0.0;
}

std::vector<double> EigenSystem::evaluate(double x) const {
  std::vector<double> out(static_cast<std::size_t>(order_) + 1);
  polys_.evaluate(x, out);
  return out;
}

std::vector<double> EigenSystem::generator_values(double x) const {
  const auto len = static_cast<std::size_t>(order_) + 1;
  std::vector<double> v(len), d1(len), d2(len);
  polys_.evaluate(x, v, d1, d2);
  const double mu = diffusion_.drift(x);
  const double s2 = diffusion_.diffusion_sq(x);
  for (std::size_t n = 0; n < len; ++n)
    v[n] = mu * d1[n] + 0.5 * s2 * d2[n];
  return v;
}

double eigen_residual(const EigenSystem& system, int n, std::span<const double> grid) {
  if (n < 0 || n > system.order())
    throw InvalidParameter("eigen_residual: mode index out of range");
  const auto idx = static_cast<std::size_t>(n);
  const double lambda = system.eigenvalue(n);
  double worst = 0.0;
  for (double x : grid) {
    const auto q = system.evaluate(x);
    const auto aq = system.generator_values(x);
    worst = std::max(worst, std::abs(aq[idx] + lambda * q[idx]));
  }
  return worst / (1.0 + std::abs(lambda));
}

void write_eigen_table_json(std::ostream& os, const EigenSystem& system) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(system.diffusion().kind()));
  const auto& p = system.diffusion().params();
  j["params"] = {{"drift_rate", p.drift_rate}, {"mean", p.mean}, {"vol_scale", p.vol_scale}};
  j["order"] = system.order();
  j["gram_deviation"] = system.gram_deviation();
  auto& modes = j["modes"] = nlohmann::json::array();
  const auto& poly = system.polynomials();
  for (int n = 0; n <= system.order(); ++n) {
    modes.push_back({{"n", n},
                     {"eigenvalue", system.eigenvalue(n)},
                     {"candidate", system.candidate_eigenvalues()[static_cast<std::size_t>(n)]},
                     {"recurrence_a", poly.a(n)},
                     {"recurrence_b", poly.b(n)}});
  }
  os << j.dump(2) << '\n';
}

namespace {

void require_interior(const Diffusion& d, double x, const char* what) {
  if (!d.space().interior(x)) {
    std::ostringstream os;
    os << what << ": " << x << " is not an interior point of the state space";
    throw DomainError(os.str());
  }
}

double time_factor(double beta, double lambda, double t) {
  const double z = lambda * std::pow(t, beta);
  if (beta == 1.0)
    return std::exp(-z);
  return mittag_leffler(beta, -z);
}

constexpr double kTruncationRatio = 1e-8;

} // namespace

SpectralDensity::SpectralDensity(std::shared_ptr<const EigenSystem> eigen, double beta, double y,
                                 double t)
    : eigen_(std::move(eigen)), beta_(beta), y_(y), t_(t) {
  if (!eigen_)
    throw InvalidParameter("SpectralDensity needs an eigen system");
  if (!(beta > 0.0 && beta <= 1.0))
    throw InvalidParameter("SpectralDensity needs 0 < beta <= 1");
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidParameter("SpectralDensity needs t > 0");
  require_interior(eigen_->diffusion(), y, "SpectralDensity start");
  const auto q = eigen_->evaluate(y);
  factors_.resize(q.size());
  coeffs_.resize(q.size());
  for (std::size_t n = 0; n < q.size(); ++n) {
    factors_[n] = n == 0 ? 1.0 : time_factor(beta, eigen_->eigenvalue(static_cast<int>(n)), t);
    coeffs_[n] = factors_[n] * q[n];
  }
}

DensityValue SpectralDensity::evaluate(double x) const {
  const Diffusion& d = eigen_->diffusion();
  require_interior(d, x, "fpd_density");
  const auto q = eigen_->evaluate(x);
  double sum = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n)
    sum += coeffs_[n] * q[n];
  const double last = coeffs_.back() * q.back();
  DensityValue out;
  out.value = d.stationary_density(x) * sum;
  out.truncation_warning = (coeffs_.size() > 1 && std::abs(last) > kTruncationRatio * std::abs(sum)) ||
                          out.value < 0.0;
  return out;
}

DensityValue SpectralDensity::evaluate_cdf(double x) const {
  const Diffusion& d = eigen_->diffusion();
  const StateSpace space = d.space();
  DensityValue out;
  if (x <= space.lower) {
    out.value = 0.0;
    return out;
  }
  if (x >= space.upper) {
    out.value = 1.0;
    return out;
  }
  const auto len = coeffs_.size();
  std::vector<double> v(len), d1(len), d2(len);
  eigen_->polynomials().evaluate(x, v, d1, d2);
  double sum = 0.0;
  double last = 0.0;
  for (std::size_t n = 1; n < len; ++n) {
    last = coeffs_[n] * d1[n] / eigen_->eigenvalue(static_cast<int>(n));
    sum += last;
  }
  const double m = d.stationary_density(x);
  const double base = d.stationary_cdf(x);
  const double flux = 0.5 * d.diffusion_sq(x) * m;
  const double f = base - flux * sum;
  out.value = std::clamp(f, 0.0, 1.0);
  out.truncation_warning = len > 1 && std::abs(flux * last) > kTruncationRatio * std::abs(f);
  return out;
}

double SpectralDensity::mean() const {
  // x = a_0 q_0 + b_1 q_1, so only the first two modes carry the mean.
  const auto& p = eigen_->polynomials();
  if (coeffs_.size() < 2)
    return p.a(0);
  return p.a(0) + p.b(1) * coeffs_[1];
}

SpectralDensity make_spectral_density(const Diffusion& diffusion, double beta, double y, double t,
                                      const SpectralOptions& options) {
  if (options.order < 0 || options.max_order < options.order)
    throw InvalidParameter("spectral options need 0 <= order <= max_order");
  require_interior(diffusion, y, "make_spectral_density start");
  if (!(beta > 0.0 && beta <= 1.0))
    throw InvalidParameter("make_spectral_density needs 0 < beta <= 1");
  if (!(t > 0.0))
    throw InvalidParameter("make_spectral_density needs t > 0");
  int order = options.order;
  for (;;) {
    auto sys = std::make_shared<const EigenSystem>(diffusion, order, options.quadrature_nodes);
    if (order >= options.max_order || order == 0)
      return SpectralDensity(sys, beta, y, t);
    const double tail = time_factor(beta, sys->eigenvalue(order), t) *
                        std::max(1.0, std::abs(sys->evaluate(y).back()));
    if (tail <= options.tail_tolerance)
      return SpectralDensity(sys, beta, y, t);
    order = std::min(2 * order, options.max_order);
  }
}

double fpd_density(const SpectralDensity& sd, double x) { return std::max(0.0, sd.evaluate(x).value); }

double fpd_cdf(const SpectralDensity& sd, double x) { return sd.evaluate_cdf(x).value; }

void write_curve_csv(std::ostream& os, std::span<const double> xs, std::span<const double> values) {
  if (xs.size() != values.size())
    throw InvalidParameter("write_curve_csv: x and value columns differ in length");
  os << "x,value\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << xs[i] << ',' << values[i] << '\n';
  os.precision(old);
}

std::vector<double> graded_mesh(double horizon, std::size_t intervals, double grading) {
  if (!(horizon > 0.0) || intervals < 1 || !(grading >= 1.0))
    throw InvalidParameter("graded_mesh needs horizon > 0, intervals >= 1, grading >= 1");
  std::vector<double> mesh(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    mesh[k] = horizon * std::pow(static_cast<double>(k) / static_cast<double>(intervals), grading);
  mesh.back() = horizon;
  return mesh;
}

double caputo_derivative(const SampledFunction& f, double beta, double t) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw InvalidParameter("caputo_derivative needs 0 < beta <= 1");
  if (f.times.size() != f.values.size())
    throw InvalidParameter("caputo_derivative: times and values differ in length");
  if (f.times.empty() || f.times.front() != 0.0)
    throw InsufficientSampling("caputo_derivative: samples must start at t = 0");
  for (std::size_t k = 1; k < f.times.size(); ++k)
    if (!(f.times[k] > f.times[k - 1]))
      throw InvalidParameter("caputo_derivative: sample times must increase strictly");
  if (!(t > 0.0) || t > f.times.back())
    throw InsufficientSampling("caputo_derivative: t must lie in (0, last sample time]");

  // Knots at or before t, plus t itself by linear interpolation.
  std::vector<double> ts;
  std::vector<double> us;
  for (std::size_t k = 0; k < f.times.size() && f.times[k] <= t; ++k) {
    ts.push_back(f.times[k]);
    us.push_back(f.values[k]);
  }
  if (ts.back() < t) {
    const std::size_t k = ts.size();
    const double w = (t - f.times[k - 1]) / (f.times[k] - f.times[k - 1]);
    ts.push_back(t);
    us.push_back((1.0 - w) * f.values[k - 1] + w * f.values[k]);
  }
  if (ts.size() < 2)
    throw InsufficientSampling("caputo_derivative: need at least two samples in [0, t]");

  const std::size_t last = ts.size() - 1;
  if (beta == 1.0)
    return (us[last] - us[last - 1]) / (ts[last] - ts[last - 1]);

  const double e = 1.0 - beta;
  double sum = 0.0;
  for (std::size_t k = 0; k < last; ++k) {
    const double slope = (us[k + 1] - us[k]) / (ts[k + 1] - ts[k]);
    sum += slope * (std::pow(t - ts[k], e) - std::pow(t - ts[k + 1], e));
  }
  return sum / std::tgamma(2.0 - beta);
}

} // namespace fpdwalk
