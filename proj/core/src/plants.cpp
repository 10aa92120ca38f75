#include "ppfc/plants.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

std::span<const double> block(std::span<const double> X, std::size_t level, std::size_t n) {
  if (X.size() < level * n) throw ValidationError("plant: state too short for level " + std::to_string(level));
  return X.subspan((level - 1) * n, n);
}

void require_level(std::size_t level, std::size_t depth) {
  if (level < 1 || level > depth) throw ValidationError("plant: level " + std::to_string(level) + " out of range");
}

void check_pitch(std::span<const double> x1) {
  if (std::abs(x1[1]) >= std::numbers::pi / 2.0 - kPitchMargin) {
    throw DomainError("quadrotor: pitch " + std::to_string(x1[1]) + " too close to +-pi/2");
  }
}

double state_core(std::span<const double> x) {
  const double r = norm(x);
  return r * r + r + 1.0;
}

}  // namespace

CoreValues PlantModel::core_functions(std::size_t, std::span<const double>) const { return {}; }

Vec plant_derivative(const PlantModel& plant, std::span<const double> X, std::span<const double> u_a,
                     double t) {
  const std::size_t n = plant.outputs();
  const std::size_t N = plant.depth();
  if (X.size() != n * N) throw ValidationError("plant_derivative: state size mismatch");
  if (u_a.size() != plant.inputs()) throw ValidationError("plant_derivative: input size mismatch");
  Vec dX(n * N);
  for (std::size_t level = 1; level <= N; ++level) {
    const auto Xi = X.first(level * n);
    const Vec fi = plant.f(level, Xi, t);
    const Vec di = plant.d(level, Xi, t);
    const Mat gi = plant.g(level, Xi, t);
    const Vec drive = level < N ? gi * block(X, level + 1, n) : gi * u_a;
    for (std::size_t j = 0; j < n; ++j) dX[(level - 1) * n + j] = fi[j] + drive[j] + di[j];
  }
  return dX;
}

// --------------------------------------------------------------------------
// Quadrotor

void QuadrotorParams::validate() const {
  if (!(Mxx > 0.0 && Myy > 0.0 && Mzz > 0.0)) throw ValidationError("quadrotor: inertia entries must be positive");
  if (disturbance.size() != 3) throw ValidationError("quadrotor: disturbance needs 3 entries");
}

Mat euler_rate_matrix(std::span<const double> x1) {
  check_pitch(x1);
  const double sp = std::sin(x1[0]), cp = std::cos(x1[0]);
  const double tt = std::tan(x1[1]), sec = 1.0 / std::cos(x1[1]);
  return Mat{{1.0, sp * tt, cp * tt}, {0.0, cp, -sp}, {0.0, sp * sec, cp * sec}};
}

Mat euler_rate_matrix_inverse(std::span<const double> x1) {
  check_pitch(x1);
  const double sp = std::sin(x1[0]), cp = std::cos(x1[0]);
  const double st = std::sin(x1[1]), ct = std::cos(x1[1]);
  return Mat{{1.0, 0.0, -st}, {0.0, cp, sp * ct}, {0.0, -sp, cp * ct}};
}

Mat euler_rate_matrix_derivative(std::span<const double> x1, std::span<const double> x2) {
  check_pitch(x1);
  const double sp = std::sin(x1[0]), cp = std::cos(x1[0]);
  const double tt = std::tan(x1[1]), sec = 1.0 / std::cos(x1[1]);
  const double roll_rate = x2[0];
  const double pitch_rate = x2[1];
  const Mat d_roll{{0.0, cp * tt, -sp * tt}, {0.0, -sp, -cp}, {0.0, cp * sec, -sp * sec}};
  const Mat d_pitch{{0.0, sp * sec * sec, cp * sec * sec}, {0.0, 0.0, 0.0}, {0.0, sp * sec * tt, cp * sec * tt}};
  return d_roll * roll_rate + d_pitch * pitch_rate;
}

Mat quad_g2(std::span<const double> x1, const QuadrotorParams& p) {
  const double inv_m[3] = {1.0 / p.Mxx, 1.0 / p.Myy, 1.0 / p.Mzz};
  return euler_rate_matrix(x1) * Mat::diag(inv_m);
}

Vec quad_f2(std::span<const double> X2, const QuadrotorParams& p) {
  const auto x1 = X2.subspan(0, 3);
  const auto x2 = X2.subspan(3, 3);
  const Vec Q = euler_rate_matrix_inverse(x1) * x2;
  const Vec MQ{p.Mxx * Q[0], p.Myy * Q[1], p.Mzz * Q[2]};
  const Vec gyro = quad_g2(x1, p) * cross(Q, MQ);
  const Vec kin = euler_rate_matrix_derivative(x1, x2) * Q;
  return sub(kin, gyro);
}

QuadrotorPlant::QuadrotorPlant(QuadrotorParams params) : params_(std::move(params)) { params_.validate(); }

Vec QuadrotorPlant::f(std::size_t level, std::span<const double> X, double) const {
  require_level(level, 2);
  if (level == 1) return Vec(3, 0.0);
  return quad_f2(X.first(6), params_);
}

Mat QuadrotorPlant::g(std::size_t level, std::span<const double> X, double) const {
  require_level(level, 2);
  if (level == 1) return Mat::identity(3);
  return quad_g2(X.first(3), params_);
}

Vec QuadrotorPlant::d(std::size_t level, std::span<const double> X, double t) const {
  require_level(level, 2);
  if (level == 1) return Vec(3, 0.0);
  return quad_g2(X.first(3), params_) * eval_exprs(params_.disturbance, t);
}

CoreValues QuadrotorPlant::core_functions(std::size_t level, std::span<const double> X) const {
  require_level(level, 2);
  if (level == 1) return {0.0, 1.0, 1.0};  // f_1 = d_1 = 0
  // f_2 is quadratic in x_2 with bounded trigonometric coefficients; d_2 is bounded.
  return {state_core(block(X, 2, 3)), 1.0, 1.0};
}

// --------------------------------------------------------------------------
// Spacecraft

Mat SpacecraftParams::inertia(double t) const {
  Mat J = J0;
  for (std::size_t i = 0; i < 3; ++i) J(i, i) += Ju[i].eval(t);
  return J;
}

void SpacecraftParams::validate() const {
  if (J0.rows() != 3 || J0.cols() != 3) throw ValidationError("spacecraft: J0 must be 3x3");
  if (max_abs_asymmetry(J0) > tol::kSymmetry) throw ValidationError("spacecraft: J0 must be symmetric");
  if (!(sym_eig_min(J0) > 0.0)) throw ValidationError("spacecraft: J0 must be positive definite");
  if (Ju.size() != 3) throw ValidationError("spacecraft: Ju needs 3 diagonal entries");
  if (D.rows() != 3 || D.cols() < 3) throw ValidationError("spacecraft: D must be 3xm with m >= 3");
  if (!(min_singular(D) > 1e-10)) throw ValidationError("spacecraft: D must have full row rank");
  if (disturbance.size() != 3) throw ValidationError("spacecraft: disturbance needs 3 entries");
}

Vec spacecraft_dyn(std::span<const double> x, double t, std::span<const double> u_a,
                   const SpacecraftParams& p) {
  const Mat J = p.inertia(t);
  const Vec Jx = J * x;
  Vec torque = cross(Jx, x);  // -(x x Jx)
  const Vec wheels = p.D * u_a;
  const Vec d0 = eval_exprs(p.disturbance, t);
  for (std::size_t i = 0; i < 3; ++i) torque[i] += wheels[i] + d0[i];
  Mat rhs(3, 1);
  rhs.set_column(0, torque);
  return solve(J, rhs).column(0);
}

SpacecraftPlant::SpacecraftPlant(SpacecraftParams params) : params_(std::move(params)) { params_.validate(); }

Vec SpacecraftPlant::f(std::size_t level, std::span<const double> X, double t) const {
  require_level(level, 1);
  const Mat J = params_.inertia(t);
  const auto x = X.first(3);
  Mat rhs(3, 1);
  rhs.set_column(0, cross(J * x, x));
  return solve(J, rhs).column(0);
}

Mat SpacecraftPlant::g(std::size_t level, std::span<const double>, double t) const {
  require_level(level, 1);
  return solve(params_.inertia(t), params_.D);
}

Vec SpacecraftPlant::d(std::size_t level, std::span<const double>, double t) const {
  require_level(level, 1);
  Mat rhs(3, 1);
  rhs.set_column(0, eval_exprs(params_.disturbance, t));
  return solve(params_.inertia(t), rhs).column(0);
}

CoreValues SpacecraftPlant::core_functions(std::size_t level, std::span<const double> X) const {
  require_level(level, 1);
  // Gyroscopic term is quadratic in x; disturbance is bounded.
  return {state_core(X.first(3)), 1.0, 1.0};
}

// --------------------------------------------------------------------------
// Chain

ChainPlant::ChainPlant(std::size_t channels, std::size_t depth, double lambda)
    : n_(channels), depth_(depth), lambda_(lambda) {
  if (n_ == 0 || depth_ == 0) throw ValidationError("chain: channels and depth must be positive");
  if (!std::isfinite(lambda_)) throw ValidationError("chain: lambda must be finite");
}

Vec ChainPlant::f(std::size_t level, std::span<const double> X, double) const {
  require_level(level, depth_);
  return scale(block(X, level, n_), lambda_);
}

Mat ChainPlant::g(std::size_t level, std::span<const double>, double) const {
  require_level(level, depth_);
  return Mat::identity(n_);
}

Vec ChainPlant::d(std::size_t level, std::span<const double>, double) const {
  require_level(level, depth_);
  return Vec(n_, 0.0);
}

CoreValues ChainPlant::core_functions(std::size_t level, std::span<const double> X) const {
  require_level(level, depth_);
  return {std::abs(lambda_) * norm(block(X, level, n_)), 1.0, 1.0};
}

}  // namespace ppfc
