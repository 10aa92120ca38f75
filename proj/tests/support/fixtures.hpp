#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ppfc/controller.hpp"
#include "ppfc/report.hpp"
#include "ppfc/sim.hpp"

namespace fixtures {

using ppfc::Mat;
using ppfc::Vec;

// Chain of integrators tracking a smooth reference; cores are (lambda|x|, 1, 1).
inline ppfc::Scenario chain_scenario(std::size_t n, std::size_t N, double lambda = 0.0,
                                     double t_final = 2.0) {
  ppfc::Scenario sc;
  sc.name = "chain";
  sc.plant = std::make_shared<ppfc::ChainPlant>(n, N, lambda);
  sc.controller.steps.assign(N, ppfc::StepGains{1.0, 0.01, 0.1});
  sc.controller.allocation = Mat::identity(n);
  sc.performance = ppfc::PerformanceSpec::uniform(n, 1.0, 1.0, 1.0, 1.0, 0.1, 0.9);
  sc.fault = ppfc::FaultProfile::healthy(n);
  std::vector<std::string> ref;
  for (std::size_t j = 0; j < n; ++j) ref.push_back(std::to_string(0.2 * (j + 1)) + "*sin(t)");
  sc.reference = ppfc::ReferenceFamily::parse(ref, static_cast<int>(N) + 1);
  sc.x0.assign(n * N, 0.0);
  for (std::size_t j = 0; j < n; ++j) sc.x0[j] = 0.1 * (j + 1);
  sc.theta0.assign(N, 0.0);
  sc.sim = {t_final, 1e-3, 10};
  return sc;
}

inline std::string csv_of(const ppfc::RunRecord& r) {
  std::ostringstream os;
  ppfc::write_csv(os, r);
  return os.str();
}

// Closed-form d a_1 / d x_1 when the level-1 cores are (0, 1, 1), as for the
// quadrotor, and depth >= 2, so Phi_1 = (|yd'| + |V|)^2 + 1 / (2 w_min^2).
inline Mat analytic_da1_dx1(const ppfc::TransformState& ts, const Vec& yd_dot,
                            const ppfc::PerformanceSpec& spec, double theta, double kappa) {
  const std::size_t n = ts.size();
  Vec w(n), s(n), v(n), dw(n), dv(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = ts.channels[j];
    const double lo = spec.delta_lo[j], hi = spec.delta_hi[j], l = spec.l[j];
    const double z = c.zeta;
    const double num = lo * hi + z * z;
    const double den = (lo + z) * (lo + z) * (hi - z) * (hi - z);
    const double dden = 2 * (lo + z) * (hi - z) * (hi - z) - 2 * (lo + z) * (lo + z) * (hi - z);
    const double dmu = (2 * z * den - num * dden) / (den * den);
    const double q = c.e * c.e + l * l;
    const double r = l * l / std::pow(q, 1.5);
    const double dr = -3 * c.e * l * l / std::pow(q, 2.5);
    const double dzeta = r / c.phi;
    w[j] = c.w;
    s[j] = c.s;
    v[j] = c.v;
    dw[j] = (dmu * dzeta * r + c.mu * dr) / c.phi;
    dv[j] = -c.phi_dot * (3 * c.e * c.e + l * l) / (c.phi * l * l);
  }
  double vnorm = 0.0;
  for (double x : v) vnorm += x * x;
  vnorm = std::sqrt(vnorm);
  double ydn = 0.0;
  for (double x : yd_dot) ydn += x * x;
  ydn = std::sqrt(ydn);
  const std::size_t jmin = static_cast<std::size_t>(std::min_element(w.begin(), w.end()) - w.begin());
  const double wmin = w[jmin];
  const double Phi = (ydn + vnorm) * (ydn + vnorm) + 0.5 / (wmin * wmin);

  Vec dPhi(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (vnorm > 0) dPhi[j] = 2 * (ydn + vnorm) * v[j] * dv[j] / vnorm;
  }
  dPhi[jmin] += -dw[jmin] / (wmin * wmin * wmin);

  Mat J(n, n);
  const double gain = kappa + theta * Phi;
  for (std::size_t i = 0; i < n; ++i) {
    const double Wi_s = w[i] * s[i];
    for (std::size_t k = 0; k < n; ++k) J(i, k) = -theta * Wi_s * dPhi[k];
    J(i, i) += -gain * (dw[i] * s[i] + w[i] * w[i]);
  }
  return J;
}

}  // namespace fixtures
