#include "fpdwalk/mittag_leffler.hpp"

#include "fpdwalk/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace fpdwalk {

namespace {

constexpr double kSeriesMaxTerm = 1e3;

double series(double beta, double z) {
  // Neumaier-compensated sum in long double.
  const long double lz = std::log(static_cast<long double>(z));
  long double sum = 1.0L;
  long double comp = 0.0L;
  for (int j = 1; j < 100000; ++j) {
    const long double mag = std::exp(j * lz - std::lgamma(1.0L + static_cast<long double>(beta) * j));
    const long double term = (j % 2 == 0) ? mag : -mag;
    const long double s = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - s) + term;
    else
      comp += (term - s) + sum;
    sum = s;
    // Past the peak the terms decrease monotonically.
    if (mag < 1e-22L && static_cast<long double>(beta) * j > z)
      break;
  }
  return static_cast<double>(sum + comp);
}

double integral(double beta, double z) {
  // The rule grows its abscissa tables lazily, so one per thread.
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  const double s = std::sin(beta * std::numbers::pi);
  const double c = std::cos(beta * std::numbers::pi);
  const double inv_beta = 1.0 / beta;
  auto integrand = [=](double v) {
    const double damp = std::exp(-std::pow(v, inv_beta));
    if (damp == 0.0)
      return 0.0;
    return damp * z / (v * v + 2.0 * z * v * c + z * z);
  };

  // Peak of the rational factor sits at -z cos(beta pi) with half width
  // z sin(beta pi); the damping factor switches off around v = 1.
  std::vector<double> cuts{0.0, 1.0};
  const double peak = -z * c;
  const double width = z * s;
  if (peak > 0.0) {
    for (double k : {-8.0, -1.0, 0.0, 1.0, 8.0}) {
      const double v = peak + k * width;
      if (v > 0.0)
        cuts.push_back(v);
    }
  }
  // exp(-v^(1/beta)) < 1e-300 beyond this point.
  const double v_end = std::pow(700.0, beta);
  cuts.push_back(v_end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size() && cuts[k] < v_end; ++k) {
    const double lo = cuts[k];
    const double hi = std::min(cuts[k + 1], v_end);
    if (hi <= lo)
      continue;
    // Shifted to start at 0: the rule places abscissas within an ulp of a
    // nonzero left end.
    total += quad.integrate([&](double u) { return integrand(lo + u); }, 0.0, hi - lo, 1e-13);
  }
  return s / (beta * std::numbers::pi) * total;
}

} // namespace

double mittag_leffler_series_log_max_term(double beta, double z) {
  if (z <= 0.0)
    return 0.0;
  // Terms grow while z > ~(beta j)^beta; scan around that point.
  const double j_peak = std::pow(z, 1.0 / beta) / beta;
  // Such a peak term is astronomically large.
  if (!(j_peak < 1e7))
    return std::numeric_limits<double>::infinity();
  const double lz = std::log(z);
  double best = 0.0;
  const long lo = std::max(0L, static_cast<long>(j_peak) - 3);
  for (long j = lo; j <= static_cast<long>(j_peak) + 3; ++j)
    best = std::max(best, j * lz - std::lgamma(1.0 + beta * j));
  return best;
}

double mittag_leffler(double beta, double arg) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    std::ostringstream os;
    os << "mittag_leffler: beta = " << beta << " outside (0, 1]";
    throw UnsupportedArgument(os.str());
  }
  const double z = -arg;
  if (!(z >= 0.0) || z > kMittagLefflerMaxArgument) {
    std::ostringstream os;
    os << "mittag_leffler: argument " << arg << " outside [-" << kMittagLefflerMaxArgument
       << ", 0]";
    throw UnsupportedArgument(os.str());
  }
  if (z == 0.0)
    return 1.0;
  if (beta == 1.0)
    return std::exp(-z);
  if (mittag_leffler_series_log_max_term(beta, z) <= std::log(kSeriesMaxTerm))
    return series(beta, z);
  return integral(beta, z);
}

} // namespace fpdwalk
