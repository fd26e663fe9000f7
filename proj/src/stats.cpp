#include "fpdwalk/stats.hpp"

#include "fpdwalk/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fpdwalk {

double ks_statistic(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf) {
  const auto& v = ecdf.sorted();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i])
      ++j;
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(j) / n - f, f - static_cast<double>(i) / n});
    i = j;
  }
  return std::clamp(d, 0.0, 1.0);
}

double kolmogorov_survival(double lambda) {
  // Below 0.2 the survival is 1 to double precision and the series
  // converges slowly.
  if (!(lambda >= 0.2))
    return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-18)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0)
    throw InsufficientSampling("ks_pvalue needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw EmptyResult("two-sample KS needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x)
      ++i;
    while (j < b.size() && b[j] == x)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  if (n == 0 || m == 0)
    throw InsufficientSampling("ks_two_sample_pvalue needs nonempty samples");
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  return ks_pvalue(d, static_cast<std::size_t>(std::max(1.0, std::round(ne))));
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                               double min_expected) {
  if (observed.size() != probs.size() || observed.empty())
    throw InvalidParameter("chi_square_gof: observed and probs must be nonempty and equal length");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  if (!(total > 0.0))
    throw InsufficientSampling("chi_square_gof: no observations");

  std::vector<double> obs_bins;
  std::vector<double> exp_bins;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += probs[i] * total;
    if (e >= min_expected) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      o = 0.0;
      e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_bins.empty()) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
    } else {
      obs_bins.back() += o;
      exp_bins.back() += e;
    }
  }

  ChiSquareResult r;
  r.bins = static_cast<int>(obs_bins.size());
  r.dof = r.bins - 1;
  for (std::size_t k = 0; k < obs_bins.size(); ++k) {
    const double diff = obs_bins[k] - exp_bins[k];
    r.statistic += diff * diff / exp_bins[k];
  }
  if (r.dof < 1)
    throw InsufficientSampling("chi_square_gof: fewer than two bins after pooling");
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

MeanEstimate mean_estimate(std::span<const double> values) {
  if (values.size() < 2)
    throw InsufficientSampling("mean_estimate needs at least two values");
  MeanEstimate m;
  m.count = values.size();
  // Welford.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  m.mean = mean;
  const double var = m2 / static_cast<double>(k - 1);
  m.std_error = std::sqrt(var / static_cast<double>(k));
  return m;
}

} // namespace fpdwalk
