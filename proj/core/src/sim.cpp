#include "ppfc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ppfc/errors.hpp"
#include "ppfc/ode.hpp"
#include "ppfc/transform.hpp"

namespace ppfc {

namespace {

// Negative estimates within this of zero are roundoff and get clamped.
constexpr double kThetaClamp = 1e-12;

LogRow make_row(const ClosedLoop& loop, const Scenario& sc, double t, std::span<const double> z) {
  const std::size_t n = sc.plant->outputs();
  const std::size_t nx = sc.plant->state_size();
  const ControllerState state = loop.snapshot(t, z, false);
  LogRow row;
  row.t = t;
  row.x.assign(z.begin(), z.begin() + static_cast<long>(nx));
  row.e = state.transform.e();
  row.s = state.transform.s();
  const FunnelBounds b = funnel_bounds(sc.performance, t);
  row.lower = b.lower;
  row.upper = b.upper;
  row.u = state.u;
  row.u_a = state.u_a;
  row.theta.assign(z.begin() + static_cast<long>(nx), z.end());
  row.Phi = state.Phi_values();
  (void)n;
  return row;
}

void check_funnel(const Scenario& sc, double t, std::span<const double> z) {
  const std::size_t n = sc.plant->outputs();
  const Vec e = sub(z.first(n), eval_ref(sc.reference, t, 0));
  (void)transform(e, t, sc.performance);
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kPass: return "PASS";
    case RunStatus::kFunnelViolation: return "FUNNEL_VIOLATION";
    case RunStatus::kNumericError: return "NUMERIC_ERROR";
  }
  return "UNKNOWN";
}

void Scenario::validate() const {
  if (!plant) throw ValidationError("scenario: plant missing");
  const std::size_t n = plant->outputs();
  const std::size_t N = plant->depth();
  if (x0.size() != n * N) {
    throw ValidationError("scenario: initial state needs " + std::to_string(n * N) + " entries");
  }
  if (theta0.size() != N) throw ValidationError("scenario: initial estimates need " + std::to_string(N) + " entries");
  for (double th : theta0)
    if (!(th >= 0.0) || !std::isfinite(th)) throw ValidationError("scenario: initial estimates must be >= 0");
  if (!all_finite(x0)) throw ValidationError("scenario: initial state must be finite");
  if (!(sim.dt > 0.0) || !std::isfinite(sim.dt)) throw ValidationError("scenario: dt must be > 0");
  if (!(sim.t_final > 0.0) || !std::isfinite(sim.t_final)) throw ValidationError("scenario: t_final must be > 0");
  if (sim.log_stride == 0) throw ValidationError("scenario: log_stride must be >= 1");
  if (fault.inputs() != plant->inputs()) throw ValidationError("scenario: fault profile input count != plant inputs");
  fault.validate(sim.t_final);
  // Constructing the controller validates gains, allocation, spec and reference.
  const BacksteppingController probe(controller, performance, reference, plant);
  const Vec e0 = sub(std::span(x0).first(n), eval_ref(reference, 0.0, 0));
  const InitialCheck ic = validate_initial(e0, performance);
  if (!ic.ok) throw ValidationError("scenario: initial error outside the funnel: " + ic.report);
}

RunRecord integrate(const Scenario& sc) {
  sc.validate();
  const BacksteppingController controller(sc.controller, sc.performance, sc.reference, sc.plant);
  const ClosedLoop loop{controller, sc.fault, sc.open_loop};

  RunRecord record;
  record.scenario = sc.name;
  record.n = sc.plant->outputs();
  record.m = sc.plant->inputs();
  record.N = sc.plant->depth();
  const std::size_t nx = sc.plant->state_size();

  Vec z = sc.x0;
  z.insert(z.end(), sc.theta0.begin(), sc.theta0.end());

  const OdeRhs rhs = [&loop](double t, std::span<const double> y, bool from_below) {
    return loop.derivative(t, y, from_below);
  };
  const std::vector<double> breaks = sc.fault.discontinuity_times();
  const StepGrid grid = make_step_grid(sc.sim.t_final, sc.sim.dt, breaks);

  RunSummary& summary = record.summary;
  std::size_t nominal_index = 0;
  double t = grid.times.front();
  try {
    record.rows.push_back(make_row(loop, sc, t, z));
    for (std::size_t k = 1; k < grid.times.size(); ++k) {
      const double t_next = grid.times[k];
      z = rk4_step(rhs, t, z, t_next - t);
      t = t_next;
      for (std::size_t i = nx; i < z.size(); ++i)
        if (z[i] < 0.0 && z[i] > -kThetaClamp) z[i] = 0.0;
      ++summary.steps;
      if (!all_finite(z)) throw NumericError("non-finite state after step at t=" + std::to_string(t));
      check_funnel(sc, t, z);
      if (grid.nominal[k]) ++nominal_index;
      const bool last = k + 1 == grid.times.size();
      if ((grid.nominal[k] && nominal_index % sc.sim.log_stride == 0) || last) {
        record.rows.push_back(make_row(loop, sc, t, z));
      }
    }
    summary.status = RunStatus::kPass;
  } catch (const FunnelViolation& v) {
    summary.status = RunStatus::kFunnelViolation;
    summary.fail_channel = v.channel();
    summary.message = v.what();
  } catch (const NumericError& err) {
    summary.status = RunStatus::kNumericError;
    summary.message = err.what();
  } catch (const DomainError& err) {
    summary.status = RunStatus::kNumericError;
    summary.message = err.what();
  }
  summary.t_end = t;

  const RunSummary counted = metrics(record);
  summary.violations_per_channel = counted.violations_per_channel;
  summary.violations = counted.violations + (summary.status == RunStatus::kFunnelViolation ? 1 : 0);
  summary.max_u_norm = counted.max_u_norm;
  summary.max_ua_norm = counted.max_ua_norm;
  summary.max_theta = counted.max_theta;
  summary.all_finite = counted.all_finite && summary.status != RunStatus::kNumericError;
  if (summary.fail_channel && *summary.fail_channel < summary.violations_per_channel.size()) {
    ++summary.violations_per_channel[*summary.fail_channel];
  }
  return record;
}

RunSummary metrics(const RunRecord& record) {
  RunSummary out = record.summary;
  out.violations = 0;
  out.violations_per_channel.assign(record.n, 0);
  out.max_u_norm = 0.0;
  out.max_ua_norm = 0.0;
  out.max_theta = 0.0;
  out.all_finite = true;
  for (const LogRow& row : record.rows) {
    for (std::size_t j = 0; j < record.n && j < row.e.size(); ++j) {
      if (!inside(row.lower[j], row.upper[j], row.e[j])) {
        ++out.violations_per_channel[j];
        ++out.violations;
      }
    }
    out.all_finite = out.all_finite && all_finite(row.x) && all_finite(row.e) && all_finite(row.s) &&
                     all_finite(row.u) && all_finite(row.u_a) && all_finite(row.theta) && all_finite(row.Phi);
    out.max_u_norm = std::max(out.max_u_norm, norm(row.u));
    out.max_ua_norm = std::max(out.max_ua_norm, norm(row.u_a));
    for (double th : row.theta) out.max_theta = std::max(out.max_theta, th);
  }
  return out;
}

ConvergenceTable convergence_study(const Scenario& scenario, std::span<const double> dts) {
  if (dts.size() < 2) throw ValidationError("convergence study: at least two step sizes required");
  const double period = dts[0] * static_cast<double>(scenario.sim.log_stride);
  std::vector<RunRecord> records;
  ConvergenceTable table;
  for (double dt : dts) {
    const double ratio = period / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
      throw ValidationError("convergence study: each dt must divide the shared log period");
    }
    Scenario variant = scenario;
    variant.sim.dt = dt;
    variant.sim.log_stride = static_cast<std::size_t>(rounded);
    records.push_back(integrate(variant));
    ConvergenceRow row;
    row.dt = dt;
    row.status = records.back().summary.status;
    row.samples = records.back().rows.size();
    row.message = records.back().summary.message;
    table.rows.push_back(row);
  }

  auto discrepancy = [](const RunRecord& a, const RunRecord& b) {
    const std::size_t count = std::min(a.rows.size(), b.rows.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k)
      for (std::size_t j = 0; j < a.rows[k].e.size(); ++j)
        worst = std::max(worst, std::abs(a.rows[k].e[j] - b.rows[k].e[j]));
    return worst;
  };
  for (std::size_t i = 1; i < records.size(); ++i) table.rows[i].discrepancy = discrepancy(records[i - 1], records[i]);
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t k = i + 1; k < records.size(); ++k)
      table.max_pairwise = std::max(table.max_pairwise, discrepancy(records[i], records[k]));
  return table;
}

}  // namespace ppfc
