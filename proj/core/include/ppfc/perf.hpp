#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ppfc/matcore.hpp"

namespace ppfc {

/// Highest derivative order of the rate/scaling functions the controller
/// may request (covers strict-feedback depth up to 3).
inline constexpr int kMaxDerivativeOrder = 3;

/// beta(t) = exp(-gamma t) cos^2(t): beta(0) = 1 and beta in [0, 1) for t > 0.
struct RateFunction {
  double gamma = 0.9;
};

/// phi(t) = (phi0 - phif) beta(t) + phif with 0 < phif < phi0 <= 1.
struct ScalingFunction {
  double phi0 = 1.0;
  double phif = 0.1;
  RateFunction rate;
};

/// H(sigma) = l sigma / sqrt(1 - sigma^2) on (-1, 1).
struct IntermediateFunction {
  double l = 1.0;
};

/// Per-channel funnel parameters. All vectors have one entry per output channel.
struct PerformanceSpec {
  std::vector<double> delta_lo;
  std::vector<double> delta_hi;
  std::vector<double> l;
  std::vector<double> phi0;
  std::vector<double> phif;
  double gamma = 0.9;

  std::size_t channels() const noexcept { return l.size(); }
  ScalingFunction scaling(std::size_t j) const { return {phi0[j], phif[j], RateFunction{gamma}}; }
  IntermediateFunction intermediate(std::size_t j) const { return {l[j]}; }

  /// Throws ValidationError unless 0 < phif < phi0 <= 1, 0 < delta <= 1, l > 0, gamma > 0.
  void validate() const;

  static PerformanceSpec uniform(std::size_t n, double delta_lo, double delta_hi, double l,
                                 double phi0, double phif, double gamma);
};

/// Exact derivative of the given order (0..kMaxDerivativeOrder) at t >= 0.
double eval_rate(const RateFunction& rf, double t, int order = 0);
double eval_scaling(const ScalingFunction& sf, double t, int order = 0);

double eval_H(const IntermediateFunction& ifn, double sigma);
double eval_H_derivative(const IntermediateFunction& ifn, double sigma);

/// phi_j^(order)(t) for every channel.
Vec scaling_vector(const PerformanceSpec& spec, double t, int order = 0);

/// A funnel edge; `unbounded` marks H evaluated at |sigma| = 1 (the edge is at
/// infinity and imposes no constraint at that instant).
struct FunnelEdge {
  double value = 0.0;
  bool unbounded = false;

  /// Signed infinity when unbounded; only for comparisons, never for output.
  double as_double() const;
};

struct FunnelBounds {
  std::vector<FunnelEdge> lower;
  std::vector<FunnelEdge> upper;
};

/// Per channel: lower = H(-delta_lo phi(t)), upper = H(delta_hi phi(t)).
FunnelBounds funnel_bounds(const PerformanceSpec& spec, double t);

/// Strict containment lower < e < upper; unbounded edges always contain.
bool inside(const FunnelEdge& lower, const FunnelEdge& upper, double e);

}  // namespace ppfc
