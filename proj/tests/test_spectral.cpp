#include "fpdwalk/config.hpp"
#include "fpdwalk/errors.hpp"
#include "fpdwalk/mittag_leffler.hpp"
#include "fpdwalk/spectral.hpp"
#include "fpdwalk/studies.hpp"

#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fpdwalk;

namespace {

using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

// Direct summation of sum_j (-z)^j / Gamma(1 + beta j) in 160 digits.
double ml_series_oracle(double beta, double z) {
  Wide sum = 0;
  Wide zw = z;
  Wide power = 1;
  for (int j = 0; j < 20000; ++j) {
    const Wide term = power / boost::multiprecision::tgamma(Wide(1) + Wide(beta) * j);
    sum += (j % 2 == 0) ? term : Wide(-term);
    if (j > 10 && abs(term) < Wide(1e-40))
      break;
    power *= zw;
  }
  return static_cast<double>(sum);
}

// Large-z expansion sum_{k=1}^{K} (-1)^(k+1) z^(-k) / Gamma(1 - beta k).
double ml_asymptotic_oracle(double beta, double z) {
  double sum = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const double g = 1.0 - beta * k;
    if (g == std::floor(g) && g <= 0.0)
      continue; // 1/Gamma vanishes at the poles
    sum += ((k % 2) ? 1.0 : -1.0) * std::pow(z, -k) / std::tgamma(g);
  }
  return sum;
}

const DiffusionKind kKinds[] = {DiffusionKind::OU, DiffusionKind::Jacobi, DiffusionKind::CIR};

} // namespace

TEST_CASE("Mittag-Leffler special values") {
  for (double beta : {0.2, 0.5, 1.0})
    CHECK(mittag_leffler(beta, 0.0) == 1.0);
  CHECK(mittag_leffler(1.0, -1.0) == doctest::Approx(0.3678794412).epsilon(1e-10));
  CHECK(std::abs(mittag_leffler(0.5, -1.0) - 0.4275835761) < 1e-10);
}

TEST_CASE("E_1/2(-x) = exp(x^2) erfc(x)") {
  for (double x : {0.01, 0.3, 1.0, 2.0, 3.5, 5.0, 8.0}) {
    CAPTURE(x);
    const double oracle = std::exp(x * x) * boost::math::erfc(x);
    CHECK(std::abs(mittag_leffler(0.5, -x) - oracle) < 1e-12);
  }
}

TEST_CASE("Mittag-Leffler against the extended-precision series") {
  // Pairs whose largest series term fits in the 160-digit oracle.
  const std::pair<double, std::vector<double>> cases[] = {
      {0.3, {0.05, 0.7, 2.0}}, {0.55, {0.05, 0.7, 2.0, 6.0, 15.0}}, {0.8, {0.05, 2.0, 15.0, 40.0}},
      {0.95, {0.7, 15.0, 60.0}}};
  for (const auto& [beta, zs] : cases)
    for (double z : zs) {
      CAPTURE(beta);
      CAPTURE(z);
      CHECK(std::abs(mittag_leffler(beta, -z) - ml_series_oracle(beta, z)) < 1e-12);
    }
}

TEST_CASE("Mittag-Leffler against the large-argument expansion") {
  for (double beta : {0.3, 0.5, 0.7, 0.9})
    for (double z : {200.0, 1e4, 1e7, 1e10}) {
      CAPTURE(beta);
      CAPTURE(z);
      const double oracle = ml_asymptotic_oracle(beta, z);
      CHECK(mittag_leffler(beta, -z) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("property: E_beta(-z) is in (0, 1] and decreasing in z") {
  for (double beta : {0.1, 0.35, 0.6, 0.85, 1.0}) {
    double prev = 1.0;
    for (double z = 0.01; z < 500.0; z *= 1.3) {
      const double v = mittag_leffler(beta, -z);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("Mittag-Leffler argument checks") {
  CHECK_THROWS_AS(mittag_leffler(0.5, 1.0), UnsupportedArgument);
  CHECK_THROWS_AS(mittag_leffler(0.5, -2e10), UnsupportedArgument);
  CHECK_THROWS_AS(mittag_leffler(1.5, -1.0), UnsupportedArgument);
  CHECK_THROWS_AS(mittag_leffler(0.0, -1.0), UnsupportedArgument);
}

TEST_CASE("orthonormal polynomials in closed form") {
  SUBCASE("OU with variance 1: Hermite") {
    // theta 1, a = 1/sqrt(2) gives sigma^2 = 1
    const Diffusion d = Diffusion::from_chain(DiffusionKind::OU, {1, 1.0 / std::sqrt(2.0), 0, 0.5});
    REQUIRE(d.stationary_variance() == doctest::Approx(1.0));
    const auto p = OrthonormalPolynomials::for_diffusion(d, 4);
    std::vector<double> v(4);
    for (double x : {-1.3, 0.4, 2.2}) {
      p.evaluate(x, v);
      CHECK(v[1] == doctest::Approx(x));
      CHECK(v[2] == doctest::Approx((x * x - 1) / std::sqrt(2.0)));
      CHECK(v[3] == doctest::Approx((x * x * x - 3 * x) / std::sqrt(6.0)));
    }
  }
  SUBCASE("first mode is the standardized coordinate") {
    for (DiffusionKind k : kKinds) {
      const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
      const auto p = OrthonormalPolynomials::for_diffusion(d, 2);
      std::vector<double> v(2);
      const double x = d.stationary_mean() + 0.2;
      p.evaluate(x, v);
      CHECK(v[1] == doctest::Approx(0.2 / std::sqrt(d.stationary_variance())));
    }
  }
}

TEST_CASE("Gauss rule reproduces stationary moments") {
  const Diffusion d = Diffusion::from_chain(DiffusionKind::CIR, {1, 2, 4, 0.5});
  const auto p = OrthonormalPolynomials::for_diffusion(d, 12);
  const GaussRule rule = gauss_rule(p, 6);
  // Gamma(8, rate 4) raw moments: prod_{j<k} (8 + j) / 4^k, exact to degree 11.
  double moment = 1.0;
  for (int k = 0; k <= 11; ++k) {
    double q = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      q += rule.weights[i] * std::pow(rule.nodes[i], k);
    CHECK(q == doctest::Approx(moment).epsilon(1e-11));
    moment *= (8.0 + k) / 4.0;
  }
}

TEST_CASE("eigen systems: Gram identity, eigen relation and eigenvalues") {
  for (DiffusionKind k : kKinds) {
    CAPTURE(to_string(k));
    const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
    const EigenSystem sys(d, 50);
    CHECK(sys.gram_deviation() < 1e-8);
    CHECK(sys.eigenvalue(0) == doctest::Approx(0.0));
    for (int n = 1; n <= 50; ++n)
      CHECK(sys.eigenvalue(n) == doctest::Approx(candidate_eigenvalue(d, n)).epsilon(1e-9));
    for (int n = 1; n < 50; ++n)
      CHECK(sys.eigenvalue(n) < sys.eigenvalue(n + 1));
    std::vector<double> grid;
    const double m = d.stationary_mean();
    const double s = std::sqrt(d.stationary_variance());
    for (int i = -20; i <= 20; ++i) {
      const double x = m + 0.15 * s * i;
      if (d.space().interior(x))
        grid.push_back(x);
    }
    for (int n = 0; n <= 10; ++n)
      CHECK(eigen_residual(sys, n, grid) < 1e-6);
  }
  // Candidate eigenvalues: n tau (OU), n theta (CIR), gamma n (1 + delta (n - 1)) (Jacobi).
  const Diffusion jac = Diffusion::from_chain(DiffusionKind::Jacobi, {1, 1, 1, 0.5});
  CHECK(candidate_eigenvalue(jac, 3) == doctest::Approx(2.0 * 3 * (1 + 0.25 * 2)));
  const Diffusion ou = Diffusion::from_chain(DiffusionKind::OU, {2, 1, 0, 0.5});
  CHECK(candidate_eigenvalue(ou, 4) == doctest::Approx(8.0));

  std::ostringstream os;
  write_eigen_table_json(os, EigenSystem(ou, 5));
  CHECK(os.str().find("\"eigenvalue\"") != std::string::npos);
}

TEST_CASE("beta = 1 OU density is the Gaussian transition kernel") {
  const Diffusion d = Diffusion::from_chain(DiffusionKind::OU, {2, 1, 0, 0.5});
  const double y = 0.4;
  for (double t : {0.1, 0.5, 2.0}) {
    const SpectralDensity sd = make_spectral_density(d, 1.0, y, t);
    const double m = y * std::exp(-2 * t);
    const double v = 0.5 * (1 - std::exp(-4 * t));
    for (double x = -2.5; x <= 2.5; x += 0.1) {
      const double g = std::exp(-(x - m) * (x - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
      CHECK(std::abs(fpd_density(sd, x) - g) < 1e-8);
    }
  }
}

// The first moment relaxes on the first mode only:
// E[X_t] = mean + (y - mean) E_beta(-lambda_1 t^beta).
TEST_CASE("density mean follows the first eigenmode") {
  for (DiffusionKind k : kKinds)
    for (double beta : {0.5, 0.8}) {
      CAPTURE(to_string(k));
      const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
      const double y = d.stationary_mean() + 0.3 * std::sqrt(d.stationary_variance());
      const SpectralDensity sd = make_spectral_density(d, beta, y, 0.7);
      const double lambda1 = candidate_eigenvalue(d, 1);
      const double expected = d.stationary_mean() + (y - d.stationary_mean()) *
                                                        mittag_leffler(beta, -lambda1 * std::pow(0.7, beta));
      CHECK(sd.mean() == doctest::Approx(expected).epsilon(1e-10));
      const auto [lo, hi] = density_support(sd);
      // Clamped truncation residue near the CIR boundary moves the mass by ~1e-8.
      CHECK(integrate_density(sd, lo, hi) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("property: density is nonnegative and the CDF is monotone") {
  for (DiffusionKind k : kKinds)
    for (double beta : {0.4, 0.9})
      for (double t : {0.3, 2.0}) {
        CAPTURE(to_string(k));
        CAPTURE(beta);
        CAPTURE(t);
        const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
        const double m = d.stationary_mean();
        const double s = std::sqrt(d.stationary_variance());
        const SpectralDensity sd = make_spectral_density(d, beta, m - 0.5 * s, t);
        double prev = 0.0;
        for (int i = -40; i <= 40; ++i) {
          const double x = m + 0.1 * s * i;
          if (!d.space().interior(x))
            continue;
          CHECK(fpd_density(sd, x) >= 0.0);
          const double c = fpd_cdf(sd, x);
          CHECK(c >= prev - 1e-9);
          prev = c;
        }
      }
}

TEST_CASE("CDF end values and interior checks") {
  const Diffusion d = Diffusion::from_chain(DiffusionKind::Jacobi, {1, 1, 1, 0.5});
  const SpectralDensity sd = make_spectral_density(d, 0.6, 0.5, 1.0);
  CHECK(fpd_cdf(sd, 0.0) == 0.0);
  CHECK(fpd_cdf(sd, 1.0) == 1.0);
  CHECK(fpd_cdf(sd, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(make_spectral_density(d, 0.6, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_spectral_density(d, 0.6, 0.5, 0.0), InvalidParameter);
  CHECK_THROWS_AS(make_spectral_density(d, 1.2, 0.5, 1.0), InvalidParameter);
}

TEST_CASE("Caputo derivative") {
  SUBCASE("linear functions are exact") {
    SampledFunction f;
    f.times = graded_mesh(1.0, 50, 2.0);
    for (double s : f.times)
      f.values.push_back(2.0 + 3.0 * s);
    for (double beta : {0.3, 0.7})
      CHECK(caputo_derivative(f, beta, 1.0) ==
            doctest::Approx(3.0 / std::tgamma(2.0 - beta)).epsilon(1e-12));
  }
  SUBCASE("t^2 converges to 2 t^(2-beta) / Gamma(3-beta) at rate h^(2-beta)") {
    SampledFunction f;
    f.times = graded_mesh(1.0, 2000, 1.0);
    for (double s : f.times)
      f.values.push_back(s * s);
    for (double beta : {0.4, 0.8})
      CHECK(caputo_derivative(f, beta, 1.0) ==
            doctest::Approx(2.0 / std::tgamma(3.0 - beta)).epsilon(2e-4));
  }
  SUBCASE("beta = 1 is the difference quotient") {
    SampledFunction f{{0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}};
    CHECK(caputo_derivative(f, 1.0, 1.0) == doctest::Approx(1.5));
  }
  SUBCASE("eigen relation of the Mittag-Leffler function") {
    const ResultTable t = check_caputo({0.5}, {2.0}, 1.0);
    CHECK(t.all_pass());
  }
  SUBCASE("input checks") {
    SampledFunction f{{0.1, 0.5}, {0.0, 1.0}};
    CHECK_THROWS_AS(caputo_derivative(f, 0.5, 0.5), InsufficientSampling);
    CHECK_THROWS_AS(graded_mesh(1.0, 0, 1.0), InvalidParameter);
  }
  const auto mesh = graded_mesh(2.0, 10, 3.0);
  CHECK(mesh.front() == 0.0);
  CHECK(mesh.back() == doctest::Approx(2.0));
  CHECK(mesh[1] == doctest::Approx(2.0 * std::pow(0.1, 3.0)));
}
