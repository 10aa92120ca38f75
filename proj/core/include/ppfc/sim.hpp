#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppfc/controller.hpp"
#include "ppfc/fault.hpp"
#include "ppfc/perf.hpp"
#include "ppfc/plants.hpp"
#include "ppfc/reference.hpp"

namespace ppfc {

struct SimSettings {
  double t_final = 20.0;
  double dt = 1e-3;
  std::size_t log_stride = 10;
};

/// Full closed-loop configuration.
struct Scenario {
  std::string name;
  std::shared_ptr<const PlantModel> plant;
  ControllerConfig controller;
  PerformanceSpec performance;
  FaultProfile fault;
  ReferenceFamily reference;
  Vec x0;      // x_1..x_N stacked
  Vec theta0;  // initial estimates, >= 0
  SimSettings sim;
  bool open_loop = false;

  /// Throws ValidationError on any inconsistency, including an initial error
  /// outside the funnel.
  void validate() const;
};

enum class RunStatus { kPass, kFunnelViolation, kNumericError };
const char* to_string(RunStatus status);

struct LogRow {
  double t = 0.0;
  Vec x;
  Vec e;
  std::vector<FunnelEdge> lower;
  std::vector<FunnelEdge> upper;
  Vec s;
  Vec u;
  Vec u_a;
  Vec theta;
  Vec Phi;
};

struct RunSummary {
  RunStatus status = RunStatus::kPass;
  std::size_t violations = 0;
  std::vector<std::size_t> violations_per_channel;
  double max_u_norm = 0.0;
  double max_ua_norm = 0.0;
  double max_theta = 0.0;
  bool all_finite = true;
  std::size_t steps = 0;
  double t_end = 0.0;
  std::optional<std::size_t> fail_channel;
  std::string message;
};

struct RunRecord {
  std::string scenario;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t N = 0;
  std::vector<LogRow> rows;
  RunSummary summary;
};

/// Fixed-step RK4 on [x; theta] with fault discontinuities as step
/// boundaries. The funnel is checked after every step; a violation or
/// non-finite value ends the run early with the record kept so far.
RunRecord integrate(const Scenario& scenario);

/// Recount from the logged samples: strict funnel containment per channel,
/// maxima of |u|, |u_a|, theta, and finiteness. Status is carried over.
RunSummary metrics(const RunRecord& record);

struct ConvergenceRow {
  double dt = 0.0;
  RunStatus status = RunStatus::kPass;
  std::size_t samples = 0;
  /// Sup-norm of e against the previous row on the shared grid (0 for the first row).
  double discrepancy = 0.0;
  std::string message;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double max_pairwise = 0.0;
};

/// Reruns the scenario at each dt, logging on a shared grid whose spacing is
/// the first dt times the scenario's log stride.
ConvergenceTable convergence_study(const Scenario& scenario, std::span<const double> dts);

}  // namespace ppfc
