#include <benchmark/benchmark.h>

#include "ppfc/controllability.hpp"
#include "ppfc/scenario.hpp"

using namespace ppfc;

namespace {

Scenario load(const char* name) { return scenario_from_json(builtin_scenario_json(name)); }

// output block just off the reference so the state sits inside the funnel
Vec near_reference(const Scenario& sc, double t) {
  Vec X = sc.x0;
  const Vec yd = eval_ref(sc.reference, t);
  for (std::size_t j = 0; j < yd.size(); ++j) X[j] = yd[j] + 0.02 * (j + 1);
  return X;
}

void BM_Transform(benchmark::State& state) {
  const auto spec = PerformanceSpec::uniform(3, 1.0, 1.0, 1.0, 1.0, 0.1, 0.9);
  const Vec e{0.2, -0.1, 0.05};
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ppfc::transform(e, t, spec));
    t += 1e-6;
  }
}
BENCHMARK(BM_Transform);

void BM_Evaluate(benchmark::State& state, const char* name) {
  const auto sc = load(name);
  const BacksteppingController ctl(sc.controller, sc.performance, sc.reference, sc.plant);
  const Vec X = near_reference(sc, 0.5);
  const Vec theta(sc.theta0.size(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ctl.evaluate(0.5, X, theta));
}
BENCHMARK_CAPTURE(BM_Evaluate, quadrotor, "quadrotor-a");
BENCHMARK_CAPTURE(BM_Evaluate, spacecraft, "spacecraft-sym");

// the nested difference quotients dominate evaluate for N >= 2
void BM_Jacobian(benchmark::State& state) {
  const auto sc = load("quadrotor-a");
  const BacksteppingController ctl(sc.controller, sc.performance, sc.reference, sc.plant);
  const auto in = ctl.inputs_at(0.5, near_reference(sc, 0.5), Vec{0.1, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(ctl.jacobians_of_virtual(1, in.truncated(1), false));
}
BENCHMARK(BM_Jacobian);

void BM_Integrate(benchmark::State& state) {
  auto sc = load("spacecraft-sym");
  sc.sim.t_final = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sc));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

void BM_CheckSweep(benchmark::State& state) {
  const auto spec = check_from_json(builtin_check_json("example2-aux"));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec.problem, spec.candidate, spec.grid, spec.margin));
}
BENCHMARK(BM_CheckSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
