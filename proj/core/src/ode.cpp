#include "ppfc/ode.hpp"

#include <algorithm>
#include <cmath>

#include "ppfc/errors.hpp"

namespace ppfc {

Vec rk4_step(const OdeRhs& f, double t, std::span<const double> y, double dt) {
  const std::size_t n = y.size();
  Vec w(n);
  const Vec k1 = f(t, y, false);
  for (std::size_t i = 0; i < n; ++i) w[i] = y[i] + 0.5 * dt * k1[i];
  const Vec k2 = f(t + 0.5 * dt, w, false);
  for (std::size_t i = 0; i < n; ++i) w[i] = y[i] + 0.5 * dt * k2[i];
  const Vec k3 = f(t + 0.5 * dt, w, false);
  for (std::size_t i = 0; i < n; ++i) w[i] = y[i] + dt * k3[i];
  const Vec k4 = f(t + dt, w, true);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

StepGrid make_step_grid(double t_final, double dt, std::span<const double> breakpoints) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("step grid: dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("step grid: t_final must be positive");
  const double snap = 1e-9 * dt;
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(t_final / dt - 1e-9)));

  StepGrid grid;
  grid.times.reserve(steps + 1 + breakpoints.size());
  std::vector<double> pending(breakpoints.begin(), breakpoints.end());
  std::sort(pending.begin(), pending.end());
  std::size_t next_bp = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    double t = std::min(static_cast<double>(k) * dt, t_final);
    while (next_bp < pending.size() && pending[next_bp] <= 0.0) ++next_bp;
    while (next_bp < pending.size() && pending[next_bp] < t - snap && pending[next_bp] < t_final) {
      grid.times.push_back(pending[next_bp++]);
      grid.nominal.push_back(false);
    }
    if (next_bp < pending.size() && std::abs(pending[next_bp] - t) <= snap) t = pending[next_bp++];
    grid.times.push_back(t);
    grid.nominal.push_back(true);
  }
  return grid;
}

Vec integrate_fixed(const OdeRhs& f, std::span<const double> y0, const StepGrid& grid,
                    const std::function<bool(std::size_t, double, std::span<const double>)>& observer) {
  Vec y(y0.begin(), y0.end());
  if (grid.times.empty()) return y;
  if (observer && !observer(0, grid.times[0], y)) return y;
  for (std::size_t k = 1; k < grid.times.size(); ++k) {
    const double t0 = grid.times[k - 1];
    y = rk4_step(f, t0, y, grid.times[k] - t0);
    if (observer && !observer(k, grid.times[k], y)) break;
  }
  return y;
}

}  // namespace ppfc
