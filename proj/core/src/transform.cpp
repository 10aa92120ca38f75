#include "ppfc/transform.hpp"

#include <cmath>
#include <sstream>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

[[noreturn]] void violation(std::size_t j, double t, double zeta, double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "funnel violation on channel " << (j + 1) << " at t=" << t << ": zeta=" << zeta
     << " not inside (" << -lo << ", " << hi << ")";
  throw FunnelViolation(j, t, os.str());
}

}  // namespace

Vec TransformState::s() const {
  Vec out(channels.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = channels[j].s;
  return out;
}

Vec TransformState::e() const {
  Vec out(channels.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = channels[j].e;
  return out;
}

double transformed_error(double zeta, double delta_lo, double delta_hi) {
  return zeta / ((delta_lo + zeta) * (delta_hi - zeta));
}

TransformState transform(std::span<const double> e, std::span<const double> phi,
                         std::span<const double> phi_dot, const PerformanceSpec& spec, double t) {
  const std::size_t n = spec.channels();
  if (e.size() != n || phi.size() != n || phi_dot.size() != n) {
    throw ValidationError("transform: expected " + std::to_string(n) + " channels");
  }
  TransformState ts;
  ts.t = t;
  ts.channels.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& c = ts.channels[j];
    const double lo = spec.delta_lo[j];
    const double hi = spec.delta_hi[j];
    const double l = spec.l[j];
    if (!std::isfinite(e[j])) violation(j, t, e[j], lo, hi);
    if (!(phi[j] > 0.0)) throw DomainError("transform: scaling function must be positive");

    c.e = e[j];
    c.phi = phi[j];
    c.phi_dot = phi_dot[j];
    const double q = e[j] * e[j] + l * l;
    const double root = std::sqrt(q);
    c.eta = e[j] / root;
    c.zeta = c.eta / phi[j];
    if (!(c.zeta > -lo + kFunnelGuardBand && c.zeta < hi - kFunnelGuardBand)) {
      violation(j, t, c.zeta, lo, hi);
    }
    const double a = lo + c.zeta;
    const double b = hi - c.zeta;
    c.s = c.zeta / (a * b);
    c.mu = (lo * hi + c.zeta * c.zeta) / (a * a * b * b);
    c.r = l * l / (q * root);
    c.w = c.mu * c.r / phi[j];
    c.v = -phi_dot[j] * c.eta / (phi[j] * c.r);
  }
  return ts;
}

TransformState transform(std::span<const double> e, double t, const PerformanceSpec& spec) {
  const Vec phi = scaling_vector(spec, t, 0);
  const Vec phi_dot = scaling_vector(spec, t, 1);
  return ppfc::transform(e, phi, phi_dot, spec, t);
}

Vec w_vector(const TransformState& ts) {
  Vec w(ts.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = ts.channels[j].w;
  return w;
}

Vec v_vector(const TransformState& ts) {
  Vec v(ts.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = ts.channels[j].v;
  return v;
}

std::pair<Mat, Vec> build_W_V(const TransformState& ts) {
  const Vec w = w_vector(ts);
  return {Mat::diag(w), v_vector(ts)};
}

InitialCheck validate_initial(std::span<const double> e0, const PerformanceSpec& spec) {
  InitialCheck out;
  const std::size_t n = spec.channels();
  std::ostringstream report;
  report.precision(10);
  if (e0.size() != n) {
    out.ok = false;
    report << "initial error has " << e0.size() << " entries, expected " << n;
    out.report = report.str();
    return out;
  }
  out.zeta.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi0 = eval_scaling(spec.scaling(j), 0.0);
    const double l = spec.l[j];
    const double root = std::sqrt(e0[j] * e0[j] + l * l);
    const double eta = e0[j] / root;
    const double zeta = eta / phi0;
    out.zeta[j] = zeta;
    // delta*phi0 -+ eta without cancellation: 1 - |eta| = l^2 / (root (root + |e|)),
    // so a full-width edge (delta*phi0 = 1) admits every finite error.
    const double slack = l * l / (root * (root + std::abs(e0[j])));
    const double gap_hi = eta > 0 ? (spec.delta_hi[j] * phi0 - 1.0) + slack : spec.delta_hi[j] * phi0 - eta;
    const double gap_lo = eta < 0 ? (spec.delta_lo[j] * phi0 - 1.0) + slack : spec.delta_lo[j] * phi0 + eta;
    if (!std::isfinite(e0[j]) || !(gap_hi > 0.0 && gap_lo > 0.0)) {
      out.ok = false;
      out.offending.push_back(j);
      report << "channel " << (j + 1) << ": zeta(0)=" << zeta << " outside (" << -spec.delta_lo[j]
             << ", " << spec.delta_hi[j] << ")\n";
    }
  }
  out.report = out.ok ? "initial condition inside the funnel" : report.str();
  return out;
}

std::pair<double, double> zeta_interval_for_bound(double bound, double delta_lo, double delta_hi) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw ValidationError("zeta interval: bound must be finite and >= 0");
  if (bound == 0.0) return {0.0, 0.0};
  // s(zeta) = +-S  <=>  S zeta^2 + (1 -+ S (delta_hi - delta_lo)) zeta -+ S delta_lo delta_hi = 0
  // (sign chosen per edge); take the root inside the admissible interval.
  auto root_inside = [&](double target) {
    const double a = target;
    const double b = 1.0 - target * (delta_hi - delta_lo);
    const double c = -target * delta_lo * delta_hi;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    // Numerically stable pair of roots.
    const double qv = -0.5 * (b + std::copysign(disc, b));
    const double r1 = qv / a;
    const double r2 = c / qv;
    return (r1 > -delta_lo && r1 < delta_hi) ? r1 : r2;
  };
  const double hi1 = root_inside(bound);
  const double lo1 = root_inside(-bound);
  return {lo1, hi1};
}

}  // namespace ppfc
