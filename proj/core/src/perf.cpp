#include "ppfc/perf.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

// |sigma| closer than this to 1 is treated as the pole of H.
constexpr double kPoleBand = 1e-12;

void check_time_and_order(double t, int order) {
  if (!(t >= 0.0)) throw ValidationError("negative time " + std::to_string(t));
  if (order < 0 || order > kMaxDerivativeOrder) {
    throw ValidationError("unsupported derivative order " + std::to_string(order));
  }
}

}  // namespace

void PerformanceSpec::validate() const {
  const std::size_t n = l.size();
  if (n == 0) throw ValidationError("performance: no channels");
  if (delta_lo.size() != n || delta_hi.size() != n || phi0.size() != n || phif.size() != n) {
    throw ValidationError("performance: per-channel vectors must have equal length");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("performance: gamma must be > 0");
  for (std::size_t j = 0; j < n; ++j) {
    const std::string ch = " (channel " + std::to_string(j + 1) + ")";
    if (!(delta_lo[j] > 0.0 && delta_lo[j] <= 1.0)) throw ValidationError("performance: delta_lo must be in (0,1]" + ch);
    if (!(delta_hi[j] > 0.0 && delta_hi[j] <= 1.0)) throw ValidationError("performance: delta_hi must be in (0,1]" + ch);
    if (!(l[j] > 0.0) || !std::isfinite(l[j])) throw ValidationError("performance: l must be > 0" + ch);
    if (!(phif[j] > 0.0 && phif[j] < phi0[j] && phi0[j] <= 1.0)) {
      throw ValidationError("performance: need 0 < phif < phi0 <= 1" + ch);
    }
  }
}

PerformanceSpec PerformanceSpec::uniform(std::size_t n, double delta_lo, double delta_hi, double l,
                                         double phi0, double phif, double gamma) {
  PerformanceSpec s;
  s.delta_lo.assign(n, delta_lo);
  s.delta_hi.assign(n, delta_hi);
  s.l.assign(n, l);
  s.phi0.assign(n, phi0);
  s.phif.assign(n, phif);
  s.gamma = gamma;
  return s;
}

double eval_rate(const RateFunction& rf, double t, int order) {
  check_time_and_order(t, order);
  // cos^2 t = (1 + cos 2t)/2, so beta = Re[ e^{-gamma t}/2 + e^{(-gamma + 2i) t}/2 ]
  // and the k-th derivative multiplies each exponential by its rate^k.
  const double decay = -rf.gamma;
  const std::complex<double> osc(-rf.gamma, 2.0);
  const double real_part = std::pow(decay, order) * std::exp(decay * t);
  const std::complex<double> osc_part = std::pow(osc, order) * std::exp(osc * t);
  if (order == 0 && t == 0.0) return 1.0;
  return 0.5 * (real_part + osc_part.real());
}

double eval_scaling(const ScalingFunction& sf, double t, int order) {
  const double beta = eval_rate(sf.rate, t, order);
  if (order == 0) return (sf.phi0 - sf.phif) * beta + sf.phif;
  return (sf.phi0 - sf.phif) * beta;
}

double eval_H(const IntermediateFunction& ifn, double sigma) {
  if (!(std::abs(sigma) < 1.0 - kPoleBand)) {
    throw DomainError("intermediate function: |sigma| must be < 1, got " + std::to_string(sigma));
  }
  return ifn.l * sigma / std::sqrt(1.0 - sigma * sigma);
}

double eval_H_derivative(const IntermediateFunction& ifn, double sigma) {
  if (!(std::abs(sigma) < 1.0 - kPoleBand)) {
    throw DomainError("intermediate function: |sigma| must be < 1, got " + std::to_string(sigma));
  }
  const double q = 1.0 - sigma * sigma;
  return ifn.l / (q * std::sqrt(q));
}

Vec scaling_vector(const PerformanceSpec& spec, double t, int order) {
  Vec out(spec.channels());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = eval_scaling(spec.scaling(j), t, order);
  return out;
}

double FunnelEdge::as_double() const {
  if (!unbounded) return value;
  return value < 0.0 ? -std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::infinity();
}

namespace {

FunnelEdge edge(const IntermediateFunction& ifn, double sigma) {
  if (std::abs(sigma) > 1.0) {
    throw DomainError("funnel edge: delta*phi exceeds 1 (" + std::to_string(sigma) + ")");
  }
  if (std::abs(sigma) >= 1.0 - kPoleBand) return {std::copysign(1.0, sigma), true};
  return {eval_H(ifn, sigma), false};
}

}  // namespace

FunnelBounds funnel_bounds(const PerformanceSpec& spec, double t) {
  FunnelBounds b;
  const std::size_t n = spec.channels();
  b.lower.reserve(n);
  b.upper.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = eval_scaling(spec.scaling(j), t);
    const auto ifn = spec.intermediate(j);
    b.lower.push_back(edge(ifn, -spec.delta_lo[j] * phi));
    b.upper.push_back(edge(ifn, spec.delta_hi[j] * phi));
  }
  return b;
}

bool inside(const FunnelEdge& lower, const FunnelEdge& upper, double e) {
  if (!std::isfinite(e)) return false;
  const bool above = lower.unbounded || e > lower.value;
  const bool below = upper.unbounded || e < upper.value;
  return above && below;
}

}  // namespace ppfc
