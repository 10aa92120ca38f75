#include "ppfc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

// Tolerance on the identity block of the allocation matrix.
constexpr double kAllocationTol = 1e-12;
// Step growth per nesting level of finite differences.
constexpr double kNestedStepGrowth = 100.0;

Vec stacked(std::span<const Vec> blocks, std::size_t count) {
  Vec out;
  for (std::size_t k = 0; k < count; ++k) out.insert(out.end(), blocks[k].begin(), blocks[k].end());
  return out;
}

void axpy(Vec& y, const Mat& a, std::span<const double> x) {
  const Vec ax = a * x;
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += ax[j];
}

[[noreturn]] void numeric_failure(const std::string& where, double t, std::size_t index) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite value in " << where << " (component " << index << ") at t=" << t;
  throw NumericError(os.str());
}

void require_finite(std::span<const double> v, const std::string& where, double t) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!std::isfinite(v[k])) numeric_failure(where, t, k);
}

}  // namespace

void ControllerConfig::validate(std::size_t n, std::size_t m) const {
  if (steps.empty()) throw ValidationError("controller: at least one step required");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!(s.kappa > 0.0 && s.sigma > 0.0 && s.mu > 0.0) ||
        !std::isfinite(s.kappa + s.sigma + s.mu)) {
      throw ValidationError("controller: kappa, sigma, mu must be positive (step " + std::to_string(i + 1) + ")");
    }
  }
  if (!(jacobian_step > 0.0 && jacobian_step < 1e-2)) {
    throw ValidationError("controller: jacobian_step must be in (0, 1e-2)");
  }
  if (allocation.rows() != n || allocation.cols() != m) {
    throw ValidationError("controller: allocation matrix must be " + std::to_string(n) + "x" + std::to_string(m));
  }
  if (m < n) throw ValidationError("controller: fewer inputs than outputs is not supported");
  if (!allocation.all_finite()) throw ValidationError("controller: allocation matrix has non-finite entries");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (std::abs(allocation(r, c) - (r == c ? 1.0 : 0.0)) > kAllocationTol) {
        throw ValidationError("controller: allocation matrix must start with the identity block");
      }
  for (std::size_t c = n; c < m; ++c) {
    bool nonzero = false;
    for (std::size_t r = 0; r < n; ++r) {
      if (allocation(r, c) < 0.0) throw ValidationError("controller: allocation column entries must be >= 0");
      nonzero = nonzero || allocation(r, c) != 0.0;
    }
    if (!nonzero) throw ValidationError("controller: allocation redundancy columns must be nonzero");
  }
}

StackInputs StackInputs::truncated(std::size_t level) const {
  StackInputs out;
  out.t = t;
  out.x.assign(x.begin(), x.begin() + static_cast<long>(level));
  out.yd.assign(yd.begin(), yd.begin() + static_cast<long>(level + 1));
  out.phi.assign(phi.begin(), phi.begin() + static_cast<long>(level + 1));
  out.theta_hat.assign(theta_hat.begin(), theta_hat.begin() + static_cast<long>(level));
  return out;
}

Vec ControllerState::theta_rates() const {
  Vec out;
  for (const auto& s : steps) out.push_back(s.theta_rate);
  return out;
}

Vec ControllerState::Phi_values() const {
  Vec out;
  for (const auto& s : steps) out.push_back(s.Phi);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Vec> epsilon_coords(std::span<const Vec> x, std::span<const Vec> a_prev,
                                const TransformState& ts) {
  if (a_prev.size() + 1 < x.size()) throw ValidationError("epsilon_coords: missing virtual controls");
  std::vector<Vec> eps;
  eps.push_back(ts.s());
  for (std::size_t i = 1; i < x.size(); ++i) eps.push_back(sub(x[i], a_prev[i - 1]));
  return eps;
}

double phi1(const TransformState& ts, std::span<const double> yd_dot, const CoreValues& core,
            bool final_step) {
  const Vec w = w_vector(ts);
  const double w_min = *std::min_element(w.begin(), w.end());
  const double c11 = core.phi_1 * core.phi_1;
  const double drift = norm(yd_dot) + norm(v_vector(ts));
  double Phi = c11 * core.phi_f * core.phi_f + c11 * drift * drift + 0.5 * core.phi_2 / (w_min * w_min);
  if (final_step) Phi += c11;
  return Phi;
}

Vec virtual_a1(const TransformState& ts, double theta_hat_1, double Phi1, double kappa_1) {
  const double gain = kappa_1 + theta_hat_1 * Phi1;
  Vec a(ts.size());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = -gain * ts.channels[j].w * ts.channels[j].s;
  return a;
}

double adapt_rate(std::span<const double> feedback, double Phi, double theta_hat, double sigma,
                  double mu) {
  return sigma * squared_norm(feedback) * Phi - mu * theta_hat;
}

double phi_i(const PhiTerms& terms) {
  const double ci1 = terms.core.phi_1 * terms.core.phi_1;
  const double jac = frobenius_norm(terms.da_prev_dx);
  const double jac2 = jac * jac;
  return ci1 * terms.core.phi_f * terms.core.phi_f +
         ci1 * terms.phi_f_prev * terms.phi_f_prev * jac2 +
         ci1 * jac2 +
         ci1 * squared_norm(terms.omega) +
         terms.phi_1_prev * terms.phi_1_prev * squared_norm(terms.feedback_prev) +
         0.5 * terms.core.phi_2;
}

double phi_N(const PhiTerms& terms) {
  return phi_i(terms) + terms.core.phi_1 * terms.core.phi_1;
}

Vec control_u(std::span<const double> feedback_N, double theta_hat_N, double Phi_N, double kappa_N,
              const Mat& A) {
  const double gain = (kappa_N + theta_hat_N * Phi_N) / spectral_norm(A);
  return scale(A.transpose() * feedback_N, -gain);
}

// ---------------------------------------------------------------------------

BacksteppingController::BacksteppingController(ControllerConfig config, PerformanceSpec spec,
                                               ReferenceFamily reference,
                                               std::shared_ptr<const PlantModel> plant)
    : config_(std::move(config)),
      spec_(std::move(spec)),
      reference_(std::move(reference)),
      plant_(std::move(plant)) {
  if (!plant_) throw ValidationError("controller: plant is required");
  const std::size_t n = plant_->outputs();
  spec_.validate();
  if (spec_.channels() != n) throw ValidationError("controller: performance spec channel count != plant outputs");
  if (reference_.channels() != n) throw ValidationError("controller: reference channel count != plant outputs");
  config_.validate(n, plant_->inputs());
  if (config_.depth() != plant_->depth()) {
    throw ValidationError("controller: number of steps (" + std::to_string(config_.depth()) +
                          ") != plant depth (" + std::to_string(plant_->depth()) + ")");
  }
  if (static_cast<int>(config_.depth()) > kMaxDerivativeOrder) {
    throw ValidationError("controller: depth above " + std::to_string(kMaxDerivativeOrder) + " is not supported");
  }
  if (reference_.max_order() < static_cast<int>(config_.depth())) {
    throw ValidationError("controller: reference derivatives up to order N are required");
  }
  allocation_norm_ = spectral_norm(config_.allocation);
}

StackInputs BacksteppingController::inputs_at(double t, std::span<const double> X,
                                              std::span<const double> theta_hat) const {
  const std::size_t n = plant_->outputs();
  const std::size_t N = depth();
  if (X.size() != n * N) throw ValidationError("controller: state size mismatch");
  if (theta_hat.size() != N) throw ValidationError("controller: estimate count mismatch");
  StackInputs in;
  in.t = t;
  for (std::size_t k = 0; k < N; ++k) in.x.emplace_back(X.begin() + static_cast<long>(k * n),
                                                        X.begin() + static_cast<long>((k + 1) * n));
  for (std::size_t k = 0; k <= N; ++k) {
    in.yd.push_back(eval_ref(reference_, t, static_cast<int>(k)));
    in.phi.push_back(scaling_vector(spec_, t, static_cast<int>(k)));
  }
  in.theta_hat.assign(theta_hat.begin(), theta_hat.end());
  return in;
}

double BacksteppingController::step_for_level(std::size_t level) const {
  return config_.jacobian_step * std::pow(kNestedStepGrowth, static_cast<double>(level - 1));
}

std::vector<StepQuantities> BacksteppingController::evaluate_steps(std::size_t level,
                                                                   const StackInputs& in) const {
  const std::size_t N = depth();
  if (level < 1 || level > N) throw ValidationError("controller: step index out of range");
  const bool final_step = level == N;
  const StepGains& gains = config_.steps[level - 1];
  const double theta = in.theta_hat[level - 1];

  if (level == 1) {
    const Vec e = sub(in.x[0], in.yd[0]);
    const TransformState ts = ppfc::transform(e, in.phi[0], in.phi[1], spec_, in.t);
    StepQuantities q;
    q.eps = ts.s();
    q.feedback.resize(q.eps.size());
    for (std::size_t j = 0; j < q.eps.size(); ++j) q.feedback[j] = ts.channels[j].w * q.eps[j];
    q.Phi = phi1(ts, in.yd[1], plant_->core_functions(1, in.x[0]), final_step);
    q.a = scale(q.feedback, -(gains.kappa + theta * q.Phi));
    q.theta_rate = adapt_rate(q.feedback, q.Phi, theta, gains.sigma, gains.mu);
    return {std::move(q)};
  }

  const StackInputs lower = in.truncated(level - 1);
  std::vector<StepQuantities> steps = evaluate_steps(level - 1, lower);
  const VirtualJacobian jac = jacobians_of_virtual(level - 1, lower, false);

  StepQuantities q;
  q.omega.assign(in.x[0].size(), 0.0);
  for (std::size_t k = 0; k < level; ++k) {
    axpy(q.omega, jac.d_yd[k], in.yd[k + 1]);
    axpy(q.omega, jac.d_phi[k], in.phi[k + 1]);
  }
  for (std::size_t k = 0; k + 1 < level; ++k) {
    for (std::size_t j = 0; j < q.omega.size(); ++j) q.omega[j] += jac.d_theta[k][j] * steps[k].theta_rate;
  }
  q.da_prev_dx = jac.d_x[level - 2];
  q.eps = sub(in.x[level - 1], steps.back().a);
  q.feedback = q.eps;

  const Vec X_here = stacked(in.x, level);
  const std::size_t n = in.x[0].size();
  const CoreValues core_here = plant_->core_functions(level, X_here);
  const CoreValues core_prev = plant_->core_functions(level - 1, std::span(X_here).first((level - 1) * n));

  PhiTerms terms;
  terms.core = core_here;
  terms.phi_f_prev = core_prev.phi_f;
  terms.phi_1_prev = core_prev.phi_1;
  terms.da_prev_dx = q.da_prev_dx;
  terms.omega = q.omega;
  terms.feedback_prev = steps.back().feedback;
  q.Phi = final_step ? phi_N(terms) : phi_i(terms);
  q.a = scale(q.feedback, -(gains.kappa + theta * q.Phi));
  q.theta_rate = adapt_rate(q.feedback, q.Phi, theta, gains.sigma, gains.mu);
  steps.push_back(std::move(q));
  return steps;
}

Vec BacksteppingController::virtual_control(std::size_t level, const StackInputs& in) const {
  return evaluate_steps(level, in.truncated(level)).back().a;
}

VirtualJacobian BacksteppingController::jacobians_of_virtual(std::size_t level, const StackInputs& in,
                                                             bool all_states) const {
  return jacobians_of_virtual(level, in, all_states, step_for_level(level));
}

VirtualJacobian BacksteppingController::jacobians_of_virtual(std::size_t level, const StackInputs& in,
                                                             bool all_states, double step) const {
  if (level < 1 || level > depth()) throw ValidationError("jacobians_of_virtual: level out of range");
  StackInputs probe = in.truncated(level);
  const std::size_t n = probe.x[0].size();

  // Central difference along one scalar input, stepping relative to its size.
  auto column = [&](double& slot) {
    const double saved = slot;
    const double h = step * std::max(1.0, std::abs(saved));
    slot = saved + h;
    const double up = slot;
    const Vec a_up = evaluate_steps(level, probe).back().a;
    slot = saved - h;
    const double down = slot;
    const Vec a_down = evaluate_steps(level, probe).back().a;
    slot = saved;
    return scale(sub(a_up, a_down), 1.0 / (up - down));
  };
  auto block = [&](Vec& v) {
    Mat m(n, v.size());
    for (std::size_t c = 0; c < v.size(); ++c) m.set_column(c, column(v[c]));
    return m;
  };

  VirtualJacobian jac;
  jac.d_x.resize(level);
  for (std::size_t k = 0; k < level; ++k)
    if (all_states || k + 1 == level) jac.d_x[k] = block(probe.x[k]);
  for (std::size_t k = 0; k <= level; ++k) jac.d_yd.push_back(block(probe.yd[k]));
  for (std::size_t k = 0; k <= level; ++k) jac.d_phi.push_back(block(probe.phi[k]));
  for (std::size_t k = 0; k < level; ++k) jac.d_theta.push_back(column(probe.theta_hat[k]));
  return jac;
}

ControllerState BacksteppingController::evaluate(double t, std::span<const double> X,
                                                 std::span<const double> theta_hat) const {
  const StackInputs in = inputs_at(t, X, theta_hat);
  ControllerState state;
  state.t = t;
  state.theta_hat = in.theta_hat;
  state.transform = ppfc::transform(sub(in.x[0], in.yd[0]), in.phi[0], in.phi[1], spec_, t);
  state.steps = evaluate_steps(depth(), in);
  state.u = scale(config_.allocation.transpose() * state.steps.back().a, 1.0 / allocation_norm_);
  return state;
}

// ---------------------------------------------------------------------------

Vec ClosedLoop::derivative(double t, std::span<const double> z, bool from_below,
                           ControllerState* snapshot) const {
  const PlantModel& plant = controller.plant();
  const std::size_t nx = plant.state_size();
  const std::size_t N = controller.depth();
  if (z.size() != nx + N) throw ValidationError("closed loop: augmented state size mismatch");
  require_finite(z, "augmented state", t);
  const auto X = z.first(nx);
  const auto theta = z.subspan(nx, N);

  ControllerState state;
  Vec theta_dot(N, 0.0);
  if (open_loop) {
    state.t = t;
    state.theta_hat.assign(theta.begin(), theta.end());
    state.u.assign(plant.inputs(), 0.0);
  } else {
    state = controller.evaluate(t, X, theta);
    theta_dot = state.theta_rates();
    require_finite(state.u, "control input u", t);
    require_finite(theta_dot, "adaptation rates", t);
  }
  state.u_a = apply_fault(state.u, t, fault, from_below);
  const Vec dX = plant_derivative(plant, X, state.u_a, t);
  require_finite(dX, "plant derivative", t);

  Vec dz(dX);
  dz.insert(dz.end(), theta_dot.begin(), theta_dot.end());
  if (snapshot) *snapshot = std::move(state);
  return dz;
}

ControllerState ClosedLoop::snapshot(double t, std::span<const double> z, bool from_below) const {
  ControllerState state;
  derivative(t, z, from_below, &state);
  if (open_loop) {
    const std::size_t n = controller.plant().outputs();
    const Vec e = sub(z.first(n), eval_ref(controller.reference(), t, 0));
    state.transform = ppfc::transform(e, t, controller.performance());
  }
  return state;
}

Vec closed_loop_derivative(double t, std::span<const double> z, const ClosedLoop& loop, bool from_below) {
  return loop.derivative(t, z, from_below);
}

}  // namespace ppfc
