#include "fpdwalk/config.hpp"
#include "fpdwalk/errors.hpp"
#include "fpdwalk/pearson.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace fpdwalk;

namespace {

// Integral of g over the state space weighted by the stationary density.
double stationary_expectation(const Diffusion& d, const std::function<double(double)>& g) {
  using boost::math::quadrature::gauss_kronrod;
  const StateSpace sp = d.space();
  const double m = d.stationary_mean();
  const double s = std::sqrt(d.stationary_variance());
  const double lo = std::isfinite(sp.lower) ? sp.lower : m - 40.0 * s;
  const double hi = std::isfinite(sp.upper) ? sp.upper : m + 40.0 * s;
  auto f = [&](double x) { return sp.interior(x) ? d.stationary_density(x) * g(x) : 0.0; };
  double total = 0.0;
  for (int k = 0; k < 40; ++k)
    total += gauss_kronrod<double, 31>::integrate(f, lo + (hi - lo) * k / 40.0,
                                                  lo + (hi - lo) * (k + 1) / 40.0, 12, 1e-13);
  return total;
}

const DiffusionKind kKinds[] = {DiffusionKind::OU, DiffusionKind::Jacobi, DiffusionKind::CIR};

} // namespace

TEST_CASE("parameter maps at the default chain parameters") {
  SUBCASE("OU (2, 1, 0): tau 2, mean 0, variance 1/2") {
    const Diffusion d = Diffusion::from_chain(DiffusionKind::OU, {2, 1, 0, 0.5});
    CHECK(d.params().drift_rate == doctest::Approx(2.0));
    CHECK(d.stationary_mean() == doctest::Approx(0.0));
    CHECK(d.stationary_variance() == doctest::Approx(0.5));
  }
  SUBCASE("OU mean -b/a") {
    const Diffusion d = Diffusion::from_chain(DiffusionKind::OU, {1, 2, 3, 0.5});
    CHECK(d.stationary_mean() == doctest::Approx(-1.5));
    CHECK(d.stationary_variance() == doctest::Approx(1.0 / 8.0));
  }
  SUBCASE("Jacobi (1, 1, 1): Beta(2, 2), gamma 2") {
    const Diffusion d = Diffusion::from_chain(DiffusionKind::Jacobi, {1, 1, 1, 0.5});
    CHECK(d.params().drift_rate == doctest::Approx(2.0));
    const auto [p, q] = d.stationary_shape();
    CHECK(p == doctest::Approx(2.0));
    CHECK(q == doctest::Approx(2.0));
    CHECK(d.stationary_variance() == doctest::Approx(0.05));
  }
  SUBCASE("CIR (1, 2, 4): Gamma(shape 8, rate 4)") {
    const Diffusion d = Diffusion::from_chain(DiffusionKind::CIR, {1, 2, 4, 0.5});
    const auto [shape, rate] = d.stationary_shape();
    CHECK(shape == doctest::Approx(8.0));
    CHECK(rate == doctest::Approx(4.0));
    CHECK(d.stationary_mean() == doctest::Approx(2.0));
    CHECK(d.stationary_variance() == doctest::Approx(0.5));
  }
}

TEST_CASE("generator coefficients") {
  const Diffusion ou = Diffusion::from_chain(DiffusionKind::OU, {2, 1, 0, 0.5});
  CHECK(ou.drift(1.5) == doctest::Approx(-3.0));
  CHECK(ou.diffusion_sq(7.0) == doctest::Approx(2.0)); // 2 tau sigma^2
  const Diffusion cir = Diffusion::from_chain(DiffusionKind::CIR, {1, 2, 4, 0.5});
  CHECK(cir.drift(3.0) == doctest::Approx(-1.0));
  CHECK(cir.diffusion_sq(3.0) == doctest::Approx(1.5)); // theta z / a
  const Diffusion jac = Diffusion::from_chain(DiffusionKind::Jacobi, {1, 1, 1, 0.5});
  CHECK(jac.diffusion_sq(0.5) == doctest::Approx(2.0 * 2.0 * 0.25 * 0.25));
}

TEST_CASE("stationary laws are normalized and have the stated moments") {
  for (DiffusionKind k : kKinds) {
    CAPTURE(to_string(k));
    const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
    CHECK(stationary_expectation(d, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(stationary_expectation(d, [](double x) { return x; }) ==
          doctest::Approx(d.stationary_mean()).epsilon(1e-10));
    const double m = d.stationary_mean();
    CHECK(stationary_expectation(d, [m](double x) { return (x - m) * (x - m); }) ==
          doctest::Approx(d.stationary_variance()).epsilon(1e-9));
  }
}

TEST_CASE("stationary CDF is the integral of the density") {
  using boost::math::quadrature::gauss_kronrod;
  for (DiffusionKind k : kKinds) {
    CAPTURE(to_string(k));
    const Diffusion d = Diffusion::from_chain(k, default_chain_params(k));
    const double m = d.stationary_mean();
    const double s = std::sqrt(d.stationary_variance());
    const double lo = std::isfinite(d.space().lower) ? d.space().lower : m - 40.0 * s;
    for (double x : {m - s, m, m + 0.5 * s}) {
      const double f = gauss_kronrod<double, 61>::integrate(
          [&](double u) { return d.space().interior(u) ? d.stationary_density(u) : 0.0; }, lo, x,
          15, 1e-13);
      CHECK(d.stationary_cdf(x) == doctest::Approx(f).epsilon(1e-10));
    }
  }
}

// The stationary density is invariant: E_m[A f] = 0 for smooth f.
TEST_CASE("property: stationary density annihilates the generator") {
  TestFunction f{[](double x) { return std::sin(x) + x * x * x; },
                 [](double x) { return std::cos(x) + 3 * x * x; },
                 [](double x) { return -std::sin(x) + 6 * x; }};
  for (DiffusionKind k : kKinds) {
    CAPTURE(to_string(k));
    for (double theta : {0.5, 2.0}) {
      ChainParams cp = default_chain_params(k);
      cp.theta = theta;
      const Diffusion d = Diffusion::from_chain(k, cp);
      CHECK(std::abs(stationary_expectation(d, [&](double x) { return d.generator_apply(f, x); })) <
            1e-9);
    }
  }
}

TEST_CASE("generator applied to x^2 matches the closed form") {
  TestFunction sq{[](double x) { return x * x; }, {}, {}};
  const Diffusion d = Diffusion::from_chain(DiffusionKind::CIR, {1, 2, 4, 0.5});
  // 2x drift(x) + diffusion_sq(x) with finite-difference derivatives.
  for (double x : {0.5, 2.0, 5.0})
    CHECK(d.generator_apply(sq, x) == doctest::Approx(2 * x * d.drift(x) + d.diffusion_sq(x)).epsilon(1e-6));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(DiffusionKind::OU, {0, 1, 0, 0.5}), InvalidParameter);
  CHECK_THROWS_AS(validate(DiffusionKind::OU, {1, 0, 0, 0.5}), InvalidParameter);
  CHECK_THROWS_AS(validate(DiffusionKind::Jacobi, {1, 1, 0, 0.5}), InvalidParameter);
  CHECK_THROWS_AS(validate(DiffusionKind::CIR, {1, 2, 4, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(validate(DiffusionKind::CIR, {1, 2, 4, 0.0}), InvalidParameter);
  CHECK_NOTHROW(validate(DiffusionKind::OU, {1, -2, 5, 0.5}));
  CHECK(parse_kind("CIR") == DiffusionKind::CIR);
  CHECK(parse_kind("Ou") == DiffusionKind::OU);
  CHECK_THROWS_AS(parse_kind("student"), InvalidParameter);
}

TEST_CASE("state-space membership") {
  const StateSpace jac = state_space(DiffusionKind::Jacobi);
  CHECK(jac.contains(0.0));
  CHECK_FALSE(jac.interior(0.0));
  CHECK(jac.interior(0.3));
  const Diffusion d = Diffusion::from_chain(DiffusionKind::Jacobi, {1, 1, 1, 0.5});
  CHECK_THROWS(d.drift(1.5));
}
