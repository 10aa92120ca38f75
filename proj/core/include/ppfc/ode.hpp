#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ppfc/matcore.hpp"

namespace ppfc {

/// Right-hand side f(t, y, from_below). `from_below` is true only for the
/// final stage of a step, so piecewise inputs are read as left limits at the
/// step's end and right limits at its start.
using OdeRhs = std::function<Vec(double t, std::span<const double> y, bool from_below)>;

/// One classical fourth-order Runge-Kutta step from t to t + dt.
Vec rk4_step(const OdeRhs& f, double t, std::span<const double> y, double dt);

/// Step boundaries on [0, t_final]: the uniform grid k*dt with every
/// breakpoint inserted (grid points within 1e-9*dt of a breakpoint snap to
/// it). Each entry records whether it lies on the nominal grid.
struct StepGrid {
  std::vector<double> times;
  std::vector<bool> nominal;
};
StepGrid make_step_grid(double t_final, double dt, std::span<const double> breakpoints);

/// Integrates y' = f from y0 over the grid; `observer(index, t, y)` is called
/// at every grid time including t = 0 and may return false to stop early.
Vec integrate_fixed(const OdeRhs& f, std::span<const double> y0, const StepGrid& grid,
                    const std::function<bool(std::size_t, double, std::span<const double>)>& observer = {});

}  // namespace ppfc
