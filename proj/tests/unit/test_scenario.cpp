#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "ppfc/errors.hpp"
#include "ppfc/report.hpp"
#include "ppfc/scenario.hpp"

using namespace ppfc;

namespace {

std::string error_of(const json& doc) {
  try {
    (void)scenario_from_json(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("builtin names") {
  const auto names = builtin_scenario_names();
  for (const char* n : {"quadrotor-a", "quadrotor-b", "spacecraft-sym", "spacecraft-asym-lo", "spacecraft-asym-hi"}) {
    CHECK(is_builtin_scenario(n));
  }
  for (const char* n : {"example1-identity", "example1-aux", "example2-unaided", "example2-aux"}) {
    CHECK(is_builtin_check(n));
  }
  CHECK_FALSE(is_builtin_scenario("example1-aux"));
  CHECK(names.size() == 5);
}

TEST_CASE("builtin scenarios build with the expected shapes") {
  const auto q = scenario_from_json(builtin_scenario_json("quadrotor-b"));
  CHECK(q.plant->outputs() == 3);
  CHECK(q.plant->inputs() == 3);
  CHECK(q.controller.depth() == 2);
  CHECK(q.x0[0] == 1.2);
  CHECK(q.fault.discontinuity_times() == Vec{3.0});

  const auto lo = scenario_from_json(builtin_scenario_json("spacecraft-asym-lo"));
  CHECK(lo.plant->inputs() == 4);
  CHECK(lo.performance.delta_lo == Vec{0.8, 0.8, 0.8});
  CHECK(lo.performance.delta_hi == Vec{1, 1, 1});
  const auto hi = scenario_from_json(builtin_scenario_json("spacecraft-asym-hi"));
  CHECK(hi.performance.delta_hi == Vec{0.6, 0.6, 0.6});
}

TEST_CASE("round trip through JSON keeps the run byte-identical") {
  for (const char* name : {"spacecraft-sym", "quadrotor-a"}) {
    auto sc = scenario_from_json(builtin_scenario_json(name));
    sc.sim.t_final = 0.5;
    const auto back = scenario_from_json(scenario_to_json(sc));
    CHECK(scenario_to_json(back) == scenario_to_json(sc));
    CHECK(fixtures::csv_of(integrate(sc)) == fixtures::csv_of(integrate(back)));
  }
}

TEST_CASE("base plus patch") {
  const json doc = json::parse(R"({"base": "spacecraft-sym", "performance": {"delta_hi": [0.6, 0.6, 0.6]}})");
  const auto resolved = resolve_scenario_json(doc);
  CHECK_FALSE(resolved.contains("base"));
  CHECK(resolved["performance"]["delta_hi"] == json::parse("[0.6,0.6,0.6]"));
  CHECK(resolved["performance"]["l"] == builtin_scenario_json("spacecraft-sym")["performance"]["l"]);
}

TEST_CASE("errors name the offending key") {
  CHECK(error_of(json::parse(R"({"base": "spacecraft-sym", "performance": {"gama": 1}})"))
            .find("performance.gama") != std::string::npos);
  CHECK(error_of(json::parse(R"({"base": "spacecraft-sym", "initial": {"x": [[0, 0]]}})")).find("initial.x") !=
        std::string::npos);
  CHECK(error_of(json::parse(R"({"base": "spacecraft-sym", "sim": {"dt": -1}})")).find("sim.dt") !=
        std::string::npos);
  CHECK(error_of(json::parse(R"({"base": "nope"})")).find("base") != std::string::npos);
  CHECK_FALSE(error_of(json::parse(R"({"base": "spacecraft-sym", "performance": {"delta_hi": [0.6,0.6,0.6]},
      "initial": {"x": [[3, 0, 0]]}})")).empty());
}

TEST_CASE("overrides") {
  json doc = resolve_scenario_json(builtin_scenario_json("quadrotor-a"));
  const auto ov = parse_overrides("initial.x.0=[1.2,-0.5,-0.5];sim.t_final=3");
  REQUIRE(ov.size() == 2);
  for (const auto& [k, v] : ov) apply_override(doc, k, v);
  CHECK(doc["initial"]["x"][0] == json::parse("[1.2,-0.5,-0.5]"));
  CHECK(doc["sim"]["t_final"] == 3);
  CHECK_THROWS_AS(apply_override(doc, "sim.nope", 1), ValidationError);
  CHECK_THROWS_AS(parse_overrides("sim.dt"), ValidationError);
  CHECK(parse_overrides("").empty());
}

TEST_CASE("CSV layout") {
  CHECK(csv_columns(1, 2, 1) == std::vector<std::string>{"t", "e1", "lo1", "hi1", "s1", "u1", "u2", "ua1", "ua2", "th1"});
  auto sc = scenario_from_json(builtin_scenario_json("quadrotor-a"));
  sc.sim.t_final = 0.05;
  const std::string csv = fixtures::csv_of(integrate(sc));
  std::istringstream is(csv);
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header.rfind("t,e1,e2,e3,lo1", 0) == 0);
  // full-width funnel at t = 0
  CHECK(first.find(",-unbounded,") != std::string::npos);
  CHECK(first.find(",unbounded,") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(1e-20) == "1e-20");
  CHECK(format_double(NAN) == "nan");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("summary and plots") {
  auto sc = scenario_from_json(builtin_scenario_json("spacecraft-sym"));
  sc.sim.t_final = 0.2;
  const auto rec = integrate(sc);
  std::ostringstream sum, svg;
  write_summary(sum, rec);
  CHECK(sum.str().find("status: PASS") != std::string::npos);
  CHECK(summary_json(rec)["status"] == "PASS");
  write_svg(svg, rec, 0);
  CHECK(svg.str().rfind("<svg", 0) == 0);
  CHECK_THROWS_AS(write_svg(svg, rec, 3), ValidationError);
}
