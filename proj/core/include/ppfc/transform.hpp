#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppfc/matcore.hpp"
#include "ppfc/perf.hpp"

namespace ppfc {

/// |zeta| closer than this to either funnel edge is reported as a violation.
inline constexpr double kFunnelGuardBand = 1e-9;

/// Error-transformation quantities for one output channel.
struct ChannelTransform {
  double e = 0.0;     // tracking error
  double eta = 0.0;   // e / sqrt(e^2 + l^2), always in (-1, 1)
  double zeta = 0.0;  // eta / phi, in (-delta_lo, delta_hi)
  double s = 0.0;     // zeta / ((delta_lo + zeta)(delta_hi - zeta))
  double mu = 0.0;    // ds/dzeta
  double r = 0.0;     // deta/de
  double w = 0.0;     // mu r / phi
  double v = 0.0;     // -phi_dot eta / (phi r)
  double phi = 0.0;
  double phi_dot = 0.0;
};

struct TransformState {
  double t = 0.0;
  std::vector<ChannelTransform> channels;

  std::size_t size() const noexcept { return channels.size(); }
  /// epsilon_1 = [s_1 .. s_n]
  Vec s() const;
  Vec e() const;
};

/// Transform with the scaling function and its rate supplied explicitly, so
/// callers can differentiate with respect to them. Throws FunnelViolation.
TransformState transform(std::span<const double> e, std::span<const double> phi,
                         std::span<const double> phi_dot, const PerformanceSpec& spec,
                         double t = 0.0);

/// Transform at time t using phi(t), phi_dot(t) from the spec.
TransformState transform(std::span<const double> e, double t, const PerformanceSpec& spec);

/// W = diag(w_j) and V = [v_j], so that d(epsilon_1)/dt = W (de/dt + V).
std::pair<Mat, Vec> build_W_V(const TransformState& ts);
Vec w_vector(const TransformState& ts);
Vec v_vector(const TransformState& ts);

struct InitialCheck {
  bool ok = true;
  std::vector<std::size_t> offending;  // zero-based channel indices
  std::vector<double> zeta;
  std::string report;
};

/// Accepts iff -delta_lo_j < zeta_j(0) < delta_hi_j for every channel.
InitialCheck validate_initial(std::span<const double> e0, const PerformanceSpec& spec);

/// Scalar s(zeta) for given edges; zeta must be strictly inside.
double transformed_error(double zeta, double delta_lo, double delta_hi);

/// (zeta_min, zeta_max): the zeta values with |s(zeta)| <= bound form this
/// closed interval, strictly inside (-delta_lo, delta_hi).
std::pair<double, double> zeta_interval_for_bound(double bound, double delta_lo, double delta_hi);

}  // namespace ppfc
