#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ppfc/errors.hpp"
#include "ppfc/fault.hpp"
#include "ppfc/plants.hpp"
#include "ppfc/reference.hpp"
#include "ppfc/time_expr.hpp"

using namespace ppfc;

TEST_CASE("time expressions") {
  const auto e = TimeExpr::parse("0.7 + 0.1*sin(t)");
  CHECK(e.eval(0.0) == doctest::Approx(0.7));
  CHECK(e.eval(0.0, 1) == doctest::Approx(0.1));
  CHECK(TimeExpr::parse("3*exp(-0.1*t+1)").eval(0.0) == doctest::Approx(3 * std::exp(1.0)));
  CHECK(TimeExpr::parse("3*exp(-0.1*t+1)").eval(2.0, 2) == doctest::Approx(0.03 * std::exp(0.8)));
  CHECK(TimeExpr::parse("-tanh(2*t)").eval(0.0, 1) == doctest::Approx(-2.0));
  CHECK(TimeExpr::parse("2.5").is_constant());
  CHECK(TimeExpr::parse("0").is_zero());
  CHECK_FALSE(TimeExpr::parse("t").is_constant());
  CHECK_THROWS_AS(TimeExpr::parse("sin(t"), ValidationError);
  CHECK_THROWS_AS(TimeExpr::parse("log(t)"), ValidationError);

  const auto x = TimeExpr::parse("0.02*tanh(2*t) - 0.3*cos(0.5*t+1) + 4*t");
  const double h = 1e-5;
  for (double t : {0.0, 0.4, 3.0}) {
    for (int k = 0; k < 3; ++k) {
      const double fd = (x.eval(t + h, k) - x.eval(t - h, k)) / (2 * h);
      CHECK(x.eval(t, k + 1) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("reference family") {
  const auto ref = ReferenceFamily::parse({"cos(t)", "sin(2*t)", "0.1*tanh(t)"});
  CHECK(eval_ref(ref, 0.0) == Vec{1, 0, 0});
  const Vec d1 = eval_ref(ref, 0.0, 1);
  CHECK(d1[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(d1[1] == doctest::Approx(2.0));
  CHECK(d1[2] == doctest::Approx(0.1));
  const auto c = ReferenceFamily::constant(2, 0.3);
  for (int k = 1; k <= 3; ++k) CHECK(eval_ref(c, 1.7, k) == Vec{0, 0});
  CHECK_THROWS_AS(eval_ref(ref, 0.0, 4), ValidationError);
}

TEST_CASE("fault profile") {
  SUBCASE("healthy") {
    const auto f = FaultProfile::healthy(3);
    CHECK(apply_fault(Vec{1, -2, 3}, 5.0, f) == Vec{1, -2, 3});
  }
  SUBCASE("piecewise with a switch") {
    FaultProfile f({{{TimeExpr(0.9)}, 3.0}, {{TimeExpr(0.5)}, 0.0}}, {TimeExpr::parse("0.1*sin(t)")});
    CHECK(f.discontinuity_times() == Vec{3.0});
    CHECK(f.rho(2.0) == Vec{0.9});
    CHECK(f.rho(3.0, true) == Vec{0.9});
    CHECK(f.rho(3.0, false) == Vec{0.5});
    CHECK(f.rho(4.0) == Vec{0.5});
    CHECK(apply_fault(Vec{2.0}, 1.0, f)[0] == doctest::Approx(1.8 + 0.1 * std::sin(1.0)));
    CHECK_NOTHROW(f.validate(10.0));
  }
  SUBCASE("effectiveness outside (0, 1]") {
    FaultProfile over({{{TimeExpr::parse("1 + 0.1*sin(t)")}, 0.0}}, {TimeExpr(0.0)});
    CHECK_THROWS_AS(over.validate(10.0), ValidationError);
    FaultProfile dead({{{TimeExpr::parse("0.5 - 0.6*sin(t)")}, 0.0}}, {TimeExpr(0.0)});
    CHECK_THROWS_AS(dead.validate(10.0), ValidationError);
  }
}

TEST_CASE("quadrotor") {
  QuadrotorParams p;
  p.disturbance = {TimeExpr(0.0), TimeExpr(0.0), TimeExpr(0.0)};
  const Mat g = quad_g2(Vec{0, 0, 0}, p);
  CHECK(g(0, 0) == doctest::Approx(1 / 0.021));
  CHECK(g(1, 1) == doctest::Approx(1 / 0.021));
  CHECK(g(2, 2) == doctest::Approx(1 / 0.039));
  CHECK(g(0, 1) == 0.0);
  CHECK(quad_f2(Vec{0.3, -0.2, 1.0, 0, 0, 0}, p) == Vec{0, 0, 0});
  CHECK_THROWS_AS(quad_g2(Vec{0, std::numbers::pi / 2, 0}, p), DomainError);

  const Vec x1{0.3, -0.4, 0.2};
  const Mat RRi = euler_rate_matrix(x1) * euler_rate_matrix_inverse(x1) - Mat::identity(3);
  CHECK(frobenius_norm(RRi) < 1e-12);

  // dR/dt by differences along x1' = x2
  const Vec x2{0.5, -0.7, 0.3};
  const double h = 1e-6;
  Vec xp = x1, xm = x1;
  for (int i = 0; i < 3; ++i) {
    xp[i] += h * x2[i];
    xm[i] -= h * x2[i];
  }
  const Mat fd = (euler_rate_matrix(xp) - euler_rate_matrix(xm)) * (1 / (2 * h));
  CHECK(frobenius_norm(fd - euler_rate_matrix_derivative(x1, x2)) < 1e-7);

  const QuadrotorPlant plant(p);
  CHECK(plant.core_functions(1, x1).phi_f == 0.0);
  CHECK(plant.f(1, x1, 0.0) == Vec{0, 0, 0});
  CHECK(plant.g(1, x1, 0.0) == Mat::identity(3));
}

TEST_CASE("spacecraft") {
  SpacecraftParams p;
  p.J0 = Mat{{20, 1.2, 0.9}, {1.2, 5, 1.4}, {0.9, 1.4, 5}};
  p.Ju = {TimeExpr(0.0), TimeExpr(0.0), TimeExpr(0.0)};
  const double c = 1 / std::sqrt(3.0);
  p.D = Mat{{1, 0, 0, c}, {0, 1, 0, c}, {0, 0, 1, c}};
  p.disturbance = {TimeExpr(0.0), TimeExpr(0.0), TimeExpr(0.0)};
  CHECK(spacecraft_dyn(Vec{0, 0, 0}, 1.0, Vec{0, 0, 0, 0}, p) == Vec{0, 0, 0});

  // principal axis: no gyroscopic torque
  Mat diagJ = Mat::diag(Vec{20, 5, 7});
  p.J0 = diagJ;
  const Vec xd = spacecraft_dyn(Vec{0, 0.8, 0}, 0.0, Vec{0, 0, 0, 0}, p);
  CHECK(norm(xd) < 1e-15);

  const SpacecraftPlant plant(p);
  CHECK(plant.inputs() == 4);
  CHECK(plant.depth() == 1);
}

TEST_CASE("plant hooks and defaults") {
  const ChainPlant chain(2, 3, 0.5);
  const Vec X{1, 2, 3, 4, 5, 6};
  CHECK(plant_derivative(chain, X, Vec{7, 8}, 0.0) == Vec{0.5 + 3, 1 + 4, 1.5 + 5, 2 + 6, 2.5 + 7, 3 + 8});

  struct Bare final : PlantModel {
    std::string name() const override { return "bare"; }
    std::size_t outputs() const override { return 1; }
    std::size_t inputs() const override { return 1; }
    std::size_t depth() const override { return 1; }
    Vec f(std::size_t, std::span<const double>, double) const override { return {0}; }
    Mat g(std::size_t, std::span<const double>, double) const override { return Mat::identity(1); }
    Vec d(std::size_t, std::span<const double>, double) const override { return {0}; }
  } bare;
  const auto cores = bare.core_functions(1, Vec{0.0});
  CHECK(cores.phi_f == 1.0);
  CHECK(cores.phi_1 == 1.0);
  CHECK(cores.phi_2 == 1.0);
}
