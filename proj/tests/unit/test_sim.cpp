#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "ppfc/ode.hpp"
#include "ppfc/scenario.hpp"
#include "ppfc/sim.hpp"

using namespace ppfc;

TEST_CASE("RK4 on x' = x") {
  const OdeRhs f = [](double, std::span<const double> y, bool) { return Vec(y.begin(), y.end()); };
  const Vec y = integrate_fixed(f, Vec{1.0}, make_step_grid(1.0, 0.01, {}));
  CHECK(std::abs(y[0] - std::exp(1.0)) < 1e-9);
}

TEST_CASE("step grid snaps to breakpoints") {
  const auto g = make_step_grid(1.0, 0.3, Vec{0.5, 0.6 + 1e-12});
  CHECK(g.times.front() == 0.0);
  CHECK(g.times.back() == 1.0);
  bool has_half = false;
  for (double t : g.times) has_half = has_half || t == 0.5;
  CHECK(has_half);
  for (std::size_t i = 1; i < g.times.size(); ++i) CHECK(g.times[i] > g.times[i - 1]);
}

TEST_CASE("uncontrolled still plant stays put") {
  auto sc = fixtures::chain_scenario(2, 1);
  sc.open_loop = true;
  const auto rec = integrate(sc);
  REQUIRE(!rec.rows.empty());
  for (const auto& row : rec.rows) CHECK(row.x == sc.x0);
}

TEST_CASE("chain tracks inside the funnel") {
  auto sc = fixtures::chain_scenario(3, 2, 0.0, 5.0);
  const auto rec = integrate(sc);
  CHECK(rec.summary.status == RunStatus::kPass);
  CHECK(rec.summary.violations == 0);
  CHECK(rec.summary.all_finite);
  CHECK(rec.rows.back().t == doctest::Approx(5.0));
}

TEST_CASE("metrics recount violations") {
  auto sc = fixtures::chain_scenario(2, 1, 0.0, 0.5);
  RunRecord rec = integrate(sc);
  for (auto& row : rec.rows) row.e.assign(2, 0.0);
  CHECK(metrics(rec).violations == 0);

  auto& row = rec.rows[rec.rows.size() / 2];
  row.e[1] = row.upper[1].value + 1.0;
  const auto m = metrics(rec);
  CHECK(m.violations == 1);
  CHECK(m.violations_per_channel == std::vector<std::size_t>{0, 1});
}

TEST_CASE("convergence study") {
  auto sc = fixtures::chain_scenario(2, 2, 0.0, 1.0);
  const Vec same{1e-3, 1e-3};
  const auto t0 = convergence_study(sc, same);
  REQUIRE(t0.rows.size() == 2);
  CHECK(t0.rows[1].discrepancy == 0.0);

  const Vec halves{1e-2, 5e-3, 2.5e-3};
  const auto t1 = convergence_study(sc, halves);
  CHECK(t1.rows[2].discrepancy < t1.rows[1].discrepancy);
  CHECK_THROWS(convergence_study(sc, Vec{1e-3, 3e-3}));
}

TEST_CASE("repeated runs are identical") {
  const auto sc = fixtures::chain_scenario(2, 2, 0.3, 2.0);
  CHECK(fixtures::csv_of(integrate(sc)) == fixtures::csv_of(integrate(sc)));
}

TEST_CASE("funnel violation stops the run and names the channel") {
  auto sc = fixtures::chain_scenario(2, 1, 0.0, 3.0);
  sc.open_loop = true;
  sc.reference = ReferenceFamily::parse({"0", "2*t"}, 2);
  sc.x0 = {0.0, 0.0};
  const auto rec = integrate(sc);
  CHECK(rec.summary.status == RunStatus::kFunnelViolation);
  REQUIRE(rec.summary.fail_channel.has_value());
  CHECK(*rec.summary.fail_channel == 1);
  CHECK(rec.summary.t_end < 3.0);
}
