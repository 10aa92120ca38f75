#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ppfc/fault.hpp"
#include "ppfc/matcore.hpp"
#include "ppfc/perf.hpp"
#include "ppfc/plants.hpp"
#include "ppfc/reference.hpp"
#include "ppfc/transform.hpp"

namespace ppfc {

struct StepGains {
  double kappa = 1.0;  // feedback gain
  double sigma = 0.01; // adaptation gain
  double mu = 0.1;     // leakage
};

struct ControllerConfig {
  std::vector<StepGains> steps;  // one per backstepping step, size N
  Mat allocation;                // A = [I_n | Lambda_1 ... Lambda_{m-n}]
  /// Relative central-difference step for Jacobians of a_1. Deeper virtual
  /// controllers are differentiated with step * 100^(level-1) because their
  /// evaluation already contains a difference quotient.
  double jacobian_step = 1e-6;

  std::size_t depth() const noexcept { return steps.size(); }
  void validate(std::size_t n, std::size_t m) const;
};

/// Inputs a_i depends on: x_1..x_i, y*^(0..i), phi^(0..i), theta_1..theta_i.
struct StackInputs {
  double t = 0.0;
  std::vector<Vec> x;
  std::vector<Vec> yd;
  std::vector<Vec> phi;
  Vec theta_hat;

  /// Keep only what a_level depends on.
  StackInputs truncated(std::size_t level) const;
};

/// Per-step quantities of the backstepping recursion.
struct StepQuantities {
  Vec eps;            // epsilon_i
  Vec feedback;       // W epsilon_1 at step 1, epsilon_i afterwards
  double Phi = 0.0;
  double theta_rate = 0.0;
  Vec a;              // a_i; at the final step the n-vector before allocation
  Vec omega;          // omega_{i-1} (empty at step 1)
  Mat da_prev_dx;     // d a_{i-1} / d x_{i-1} (empty at step 1)
};

/// Partials of a_i. d_x[k] is empty unless requested.
struct VirtualJacobian {
  std::vector<Mat> d_x;      // k = 1..i  (index k-1)
  std::vector<Mat> d_yd;     // k = 0..i
  std::vector<Mat> d_phi;    // k = 0..i
  std::vector<Vec> d_theta;  // k = 1..i  (index k-1)
};

/// Live adaptive estimates plus everything computed during one evaluation.
struct ControllerState {
  double t = 0.0;
  Vec theta_hat;
  TransformState transform;
  std::vector<StepQuantities> steps;
  Vec u;
  Vec u_a;

  Vec theta_rates() const;
  Vec Phi_values() const;
};

// ---------------------------------------------------------------------------
// Building blocks. Each maps directly onto one line of the design.

/// epsilon_1 = s, epsilon_i = x_i - a_{i-1}.
std::vector<Vec> epsilon_coords(std::span<const Vec> x, std::span<const Vec> a_prev,
                                const TransformState& ts);

/// Phi_1 = c11^2 cf1^2 + c11^2 (|y*'| + |V|)^2 + 1/2 lambda_min(W)^-2 c12,
/// plus c11^2 when step 1 is also the final step.
double phi1(const TransformState& ts, std::span<const double> yd_dot, const CoreValues& core,
            bool final_step);

/// a_1 = -kappa_1 W eps_1 - theta_1 Phi_1 W eps_1.
Vec virtual_a1(const TransformState& ts, double theta_hat_1, double Phi1, double kappa_1);

/// sigma |feedback|^2 Phi - mu theta.
double adapt_rate(std::span<const double> feedback, double Phi, double theta_hat, double sigma,
                  double mu);

struct PhiTerms {
  CoreValues core;           // phi_fi(X_i), phi_i1(X_{i-1}), phi_i2(X_i)
  double phi_f_prev = 1.0;   // phi_f(i-1)(X_{i-1})
  double phi_1_prev = 1.0;   // phi_(i-1)1(X_{i-2})
  Mat da_prev_dx;            // d a_{i-1} / d x_{i-1}
  Vec omega;                 // omega_{i-1}
  Vec feedback_prev;         // W eps_1 when i = 2, else eps_{i-1}
};

/// Phi_i for intermediate steps 2..N-1.
double phi_i(const PhiTerms& terms);
/// Phi_N: Phi_i plus the bias-fault term phi_N1^2.
double phi_N(const PhiTerms& terms);

/// u = -(A^T / |A|) (kappa_N + theta_N Phi_N) feedback_N, |A| the spectral norm.
Vec control_u(std::span<const double> feedback_N, double theta_hat_N, double Phi_N, double kappa_N,
              const Mat& A);

// ---------------------------------------------------------------------------

class BacksteppingController {
 public:
  BacksteppingController(ControllerConfig config, PerformanceSpec spec, ReferenceFamily reference,
                         std::shared_ptr<const PlantModel> plant);

  const ControllerConfig& config() const noexcept { return config_; }
  const PerformanceSpec& performance() const noexcept { return spec_; }
  const ReferenceFamily& reference() const noexcept { return reference_; }
  const PlantModel& plant() const noexcept { return *plant_; }
  std::size_t depth() const noexcept { return config_.depth(); }

  /// Reference and scaling-function derivatives at t, orders 0..N.
  StackInputs inputs_at(double t, std::span<const double> X, std::span<const double> theta_hat) const;

  /// Steps 1..level of the recursion evaluated at the given inputs.
  std::vector<StepQuantities> evaluate_steps(std::size_t level, const StackInputs& in) const;
  Vec virtual_control(std::size_t level, const StackInputs& in) const;

  /// Central-difference partials of a_level (level < N) w.r.t. all of its
  /// inputs; `all_states` false computes only d a/d x_level.
  VirtualJacobian jacobians_of_virtual(std::size_t level, const StackInputs& in,
                                       bool all_states = true) const;
  VirtualJacobian jacobians_of_virtual(std::size_t level, const StackInputs& in, bool all_states,
                                       double step) const;

  /// Full evaluation: transform, all steps, u (u_a left empty).
  ControllerState evaluate(double t, std::span<const double> X, std::span<const double> theta_hat) const;

 private:
  double step_for_level(std::size_t level) const;

  ControllerConfig config_;
  PerformanceSpec spec_;
  ReferenceFamily reference_;
  std::shared_ptr<const PlantModel> plant_;
  double allocation_norm_ = 1.0;
};

/// Augmented closed-loop state [x_1; ...; x_N; theta_1..theta_N].
struct ClosedLoop {
  const BacksteppingController& controller;
  const FaultProfile& fault;
  bool open_loop = false;  // force u = 0 and freeze the estimates

  /// d/dt of the augmented state. Throws FunnelViolation or NumericError.
  Vec derivative(double t, std::span<const double> z, bool from_below = false,
                 ControllerState* snapshot = nullptr) const;
  ControllerState snapshot(double t, std::span<const double> z, bool from_below = false) const;
};

Vec closed_loop_derivative(double t, std::span<const double> z, const ClosedLoop& loop,
                           bool from_below = false);

}  // namespace ppfc
