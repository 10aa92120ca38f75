#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ppfc/errors.hpp"
#include "ppfc/perf.hpp"

using namespace ppfc;

TEST_CASE("rate function") {
  const RateFunction rf{0.9};
  CHECK(eval_rate(rf, 0.0) == 1.0);
  CHECK(eval_rate(RateFunction{3.0}, 0.0) == 1.0);
  CHECK(eval_rate(rf, std::numbers::pi / 2) == doctest::Approx(0.0).scale(1.0));
  CHECK(eval_rate(rf, 0.0, 1) == doctest::Approx(-0.9));
  CHECK_THROWS_AS(eval_rate(rf, -0.1), ValidationError);
  CHECK_THROWS_AS(eval_rate(rf, 1.0, kMaxDerivativeOrder + 1), ValidationError);
}

TEST_CASE("rate derivatives match central differences") {
  const RateFunction rf{0.7};
  const double h = 1e-5;
  for (double t : {0.3, 1.1, 2.5, 7.0}) {
    for (int k = 0; k < kMaxDerivativeOrder; ++k) {
      const double fd = (eval_rate(rf, t + h, k) - eval_rate(rf, t - h, k)) / (2 * h);
      CHECK(eval_rate(rf, t, k + 1) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("scaling function") {
  const ScalingFunction sf{1.0, 0.1, RateFunction{0.9}};
  CHECK(eval_scaling(sf, 0.0) == 1.0);
  CHECK(eval_scaling(sf, 0.0, 1) == doctest::Approx(-0.81));
  // beta = 0.5 at some t: phi = 0.9 * 0.5 + 0.1
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval_rate(sf.rate, mid) > 0.5 ? lo : hi) = mid;
  }
  CHECK(eval_scaling(sf, lo) == doctest::Approx(0.55).epsilon(1e-12));
  // never below phif, returns to it where cos t = 0
  for (double t = 0.0; t < 20.0; t += 0.01) CHECK(eval_scaling(sf, t) >= 0.1 - 1e-15);
  CHECK(eval_scaling(sf, 3 * std::numbers::pi / 2) == doctest::Approx(0.1));
}

TEST_CASE("intermediate function") {
  CHECK(eval_H({1.0}, 0.0) == 0.0);
  CHECK(eval_H({1.0}, 0.6) == doctest::Approx(0.75));
  CHECK_THROWS_AS(eval_H({1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(eval_H({1.0}, -1.2), DomainError);
  const IntermediateFunction H{0.9936};
  double prev = -1e300;
  for (double s = -0.99; s < 0.99; s += 0.01) {
    CHECK(eval_H(H, -s) == doctest::Approx(-eval_H(H, s)));
    CHECK(eval_H(H, s) > prev);
    CHECK(eval_H_derivative(H, s) >= H.l - 1e-15);
    prev = eval_H(H, s);
  }
}

TEST_CASE("funnel bounds") {
  SUBCASE("symmetric funnel is symmetric") {
    const auto spec = PerformanceSpec::uniform(3, 1.0, 1.0, 0.9936, 1.0, 0.1, 0.9);
    const auto b = funnel_bounds(spec, 1.3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(b.lower[j].value == -b.upper[j].value);
  }
  SUBCASE("full-width start is unbounded") {
    const auto spec = PerformanceSpec::uniform(1, 1.0, 1.0, 0.9936, 1.0, 0.1, 0.9);
    const auto b = funnel_bounds(spec, 0.0);
    CHECK(b.upper[0].unbounded);
    CHECK(b.lower[0].unbounded);
    CHECK(std::isinf(b.upper[0].as_double()));
    CHECK(b.lower[0].as_double() < 0);
    CHECK(inside(b.lower[0], b.upper[0], 1e12));
    CHECK_FALSE(funnel_bounds(spec, 0.1).upper[0].unbounded);
  }
  SUBCASE("asymmetric upper edge") {
    const auto spec = PerformanceSpec::uniform(1, 1.0, 0.6, 1.0, 0.5, 0.1, 0.9);
    const auto b = funnel_bounds(spec, 0.0);
    CHECK(b.upper[0].value == doctest::Approx(0.3 / std::sqrt(1 - 0.09)));
    CHECK(b.upper[0].value == doctest::Approx(0.3145).epsilon(1e-4));
    CHECK(inside(b.lower[0], b.upper[0], 0.3));
    CHECK_FALSE(inside(b.lower[0], b.upper[0], 0.32));
  }
}

TEST_CASE("performance validation") {
  CHECK_THROWS_AS(PerformanceSpec::uniform(1, 1.0, 1.0, 1.0, 0.1, 0.2, 0.9).validate(), ValidationError);
  CHECK_THROWS_AS(PerformanceSpec::uniform(1, 1.2, 1.0, 1.0, 1.0, 0.1, 0.9).validate(), ValidationError);
  CHECK_THROWS_AS(PerformanceSpec::uniform(1, 1.0, 1.0, 0.0, 1.0, 0.1, 0.9).validate(), ValidationError);
  CHECK_THROWS_AS(PerformanceSpec::uniform(1, 1.0, 1.0, 1.0, 1.0, 0.1, -1.0).validate(), ValidationError);
  CHECK_NOTHROW(PerformanceSpec::uniform(2, 0.8, 0.6, 1.0, 1.0, 0.1, 0.9).validate());
}
