#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ppfc/matcore.hpp"
#include "ppfc/time_expr.hpp"

namespace ppfc {

/// Values of the core functions bounding the level-i uncertainty:
/// ||f_i + d_i|| <= a_fi phi_f, ||P_i|| <= a_i1 phi_1, ||dP_i/dt|| <= a_i2 phi_2.
struct CoreValues {
  double phi_f = 1.0;
  double phi_1 = 1.0;
  double phi_2 = 1.0;
};

/// Strict-feedback plant
///   x_k' = f_k(X_k) + g_k(X_k, t) x_{k+1} + d_k(X_k, t),  k < N
///   x_N' = f_N(X_N) + g_N(X_N, t) u_a     + d_N(X_N, t)
/// with x_k in R^n, u_a in R^m. Levels are 1-based; X passed to a level-i hook
/// holds x_1..x_i stacked (possibly more, which hooks ignore).
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t outputs() const = 0;
  virtual std::size_t inputs() const = 0;
  virtual std::size_t depth() const = 0;

  virtual Vec f(std::size_t level, std::span<const double> X, double t) const = 0;
  virtual Mat g(std::size_t level, std::span<const double> X, double t) const = 0;
  virtual Vec d(std::size_t level, std::span<const double> X, double t) const = 0;

  /// Defaults to all ones, the fallback when no structure is known.
  virtual CoreValues core_functions(std::size_t level, std::span<const double> X) const;

  std::size_t state_size() const { return outputs() * depth(); }
};

/// dX/dt of the strict-feedback chain for the given actuator output u_a.
Vec plant_derivative(const PlantModel& plant, std::span<const double> X,
                     std::span<const double> u_a, double t);

// ---------------------------------------------------------------------------
// Quadrotor rotational dynamics, x_1 = Euler angles (roll, pitch, yaw),
// x_2 = Euler angle rates.

struct QuadrotorParams {
  double Mxx = 0.021;
  double Myy = 0.021;
  double Mzz = 0.039;
  /// Body torque disturbance Delta(t).
  std::vector<TimeExpr> disturbance;

  void validate() const;
};

/// Pitch closer than this to +-pi/2 is rejected (tan/sec blow up).
inline constexpr double kPitchMargin = 1e-3;

/// Euler-rate matrix R(phi, theta): Theta' = R Q.
Mat euler_rate_matrix(std::span<const double> x1);
Mat euler_rate_matrix_inverse(std::span<const double> x1);
/// dR/dt with (phi', theta') read from x2.
Mat euler_rate_matrix_derivative(std::span<const double> x1, std::span<const double> x2);

/// g_2(x_1) = R M^-1.
Mat quad_g2(std::span<const double> x1, const QuadrotorParams& p);
/// f_2 = -R M^-1 (Q x M Q) + R' Q with Q = R^-1 x_2 (body rates).
Vec quad_f2(std::span<const double> X2, const QuadrotorParams& p);

class QuadrotorPlant final : public PlantModel {
 public:
  explicit QuadrotorPlant(QuadrotorParams params);

  std::string name() const override { return "quadrotor"; }
  std::size_t outputs() const override { return 3; }
  std::size_t inputs() const override { return 3; }
  std::size_t depth() const override { return 2; }

  Vec f(std::size_t level, std::span<const double> X, double t) const override;
  Mat g(std::size_t level, std::span<const double> X, double t) const override;
  Vec d(std::size_t level, std::span<const double> X, double t) const override;
  CoreValues core_functions(std::size_t level, std::span<const double> X) const override;

  const QuadrotorParams& params() const noexcept { return params_; }

 private:
  QuadrotorParams params_;
};

// ---------------------------------------------------------------------------
// Rigid spacecraft with reaction wheels, x = body angular velocity.

struct SpacecraftParams {
  Mat J0;                          // 3x3 nominal inertia, symmetric PD
  std::vector<TimeExpr> Ju;        // diagonal inertia uncertainty
  Mat D;                           // 3xm wheel configuration, full row rank
  std::vector<TimeExpr> disturbance;  // d_0(t), torque

  Mat inertia(double t) const;
  void validate() const;
};

/// x' = -J^-1 (x x J x) + J^-1 D u_a + J^-1 d_0(t).
Vec spacecraft_dyn(std::span<const double> x, double t, std::span<const double> u_a,
                   const SpacecraftParams& p);

class SpacecraftPlant final : public PlantModel {
 public:
  explicit SpacecraftPlant(SpacecraftParams params);

  std::string name() const override { return "spacecraft"; }
  std::size_t outputs() const override { return 3; }
  std::size_t inputs() const override { return params_.D.cols(); }
  std::size_t depth() const override { return 1; }

  Vec f(std::size_t level, std::span<const double> X, double t) const override;
  Mat g(std::size_t level, std::span<const double> X, double t) const override;
  Vec d(std::size_t level, std::span<const double> X, double t) const override;
  CoreValues core_functions(std::size_t level, std::span<const double> X) const override;

  const SpacecraftParams& params() const noexcept { return params_; }

 private:
  SpacecraftParams params_;
};

// ---------------------------------------------------------------------------
// Chain of integrators x_k' = lambda x_k + x_{k+1}, x_N' = lambda x_N + u_a.
// Synthetic plant for sanity checks and depth-3 exercises.

class ChainPlant final : public PlantModel {
 public:
  ChainPlant(std::size_t channels, std::size_t depth, double lambda = 0.0);

  std::string name() const override { return "chain"; }
  std::size_t outputs() const override { return n_; }
  std::size_t inputs() const override { return n_; }
  std::size_t depth() const override { return depth_; }

  Vec f(std::size_t level, std::span<const double> X, double t) const override;
  Mat g(std::size_t level, std::span<const double> X, double t) const override;
  Vec d(std::size_t level, std::span<const double> X, double t) const override;
  CoreValues core_functions(std::size_t level, std::span<const double> X) const override;

  double lambda() const noexcept { return lambda_; }

 private:
  std::size_t n_;
  std::size_t depth_;
  double lambda_;
};

}  // namespace ppfc
