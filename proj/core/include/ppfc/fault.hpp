#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ppfc/matcore.hpp"
#include "ppfc/time_expr.hpp"

namespace ppfc {

/// Actuator fault u_a = rho(t) u + upsilon(t) with diagonal effectiveness
/// rho_j(t) in (0, 1] (partial loss of effectiveness) and bounded bias.
///
/// rho is piecewise: segment k is active on (until_{k-1}, until_k]; the last
/// segment has no end. Segment ends are the profile's discontinuity times.
class FaultProfile {
 public:
  struct Segment {
    std::vector<TimeExpr> rho;
    double until = 0.0;  // ignored for the last segment
  };

  FaultProfile() = default;
  FaultProfile(std::vector<Segment> segments, std::vector<TimeExpr> bias);

  /// Healthy actuators: rho = I, upsilon = 0.
  static FaultProfile healthy(std::size_t m);

  std::size_t inputs() const noexcept { return bias_.size(); }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<TimeExpr>& bias() const noexcept { return bias_; }
  std::vector<double> discontinuity_times() const;

  /// At a segment end, from_below picks the segment that ends there.
  Vec rho(double t, bool from_below = false) const;
  Vec upsilon(double t) const;

  /// Samples [0, horizon] at `step` and throws ValidationError if any rho_j
  /// leaves (0, 1]. Returns the largest sampled bias norm.
  double validate(double horizon, double step = 1e-2) const;

 private:
  const Segment& segment_at(double t, bool from_below) const;

  std::vector<Segment> segments_;
  std::vector<TimeExpr> bias_;
};

/// Componentwise rho_j(t) u_j + upsilon_j(t).
Vec apply_fault(std::span<const double> u, double t, const FaultProfile& profile,
                bool from_below = false);

}  // namespace ppfc
