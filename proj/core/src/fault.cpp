#include "ppfc/fault.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {
// Roundoff allowance above 1 when checking rho <= 1 on samples.
constexpr double kRhoSlack = 1e-12;
}  // namespace

FaultProfile::FaultProfile(std::vector<Segment> segments, std::vector<TimeExpr> bias)
    : segments_(std::move(segments)), bias_(std::move(bias)) {
  if (segments_.empty()) throw ValidationError("fault: at least one rho segment required");
  const std::size_t m = bias_.size();
  if (m == 0) throw ValidationError("fault: bias must have one entry per input");
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    if (segments_[k].rho.size() != m) {
      throw ValidationError("fault: segment " + std::to_string(k) + " has " +
                            std::to_string(segments_[k].rho.size()) + " rho entries, expected " +
                            std::to_string(m));
    }
    if (k + 1 < segments_.size()) {
      const double prev = k == 0 ? 0.0 : segments_[k - 1].until;
      if (!(segments_[k].until > prev) || !std::isfinite(segments_[k].until)) {
        throw ValidationError("fault: segment end times must be positive and increasing");
      }
    }
  }
}

FaultProfile FaultProfile::healthy(std::size_t m) {
  return FaultProfile({Segment{std::vector<TimeExpr>(m, TimeExpr(1.0)), 0.0}},
                      std::vector<TimeExpr>(m, TimeExpr(0.0)));
}

std::vector<double> FaultProfile::discontinuity_times() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) out.push_back(segments_[k].until);
  return out;
}

const FaultProfile::Segment& FaultProfile::segment_at(double t, bool from_below) const {
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double end = segments_[k].until;
    if (t < end || (t == end && from_below)) return segments_[k];
  }
  return segments_.back();
}

Vec FaultProfile::rho(double t, bool from_below) const {
  return eval_exprs(segment_at(t, from_below).rho, t);
}

Vec FaultProfile::upsilon(double t) const { return eval_exprs(bias_, t); }

double FaultProfile::validate(double horizon, double step) const {
  if (!(step > 0.0)) throw ValidationError("fault: validation step must be positive");
  const auto samples = static_cast<std::size_t>(std::ceil(horizon / step));
  std::vector<double> times;
  for (std::size_t k = 0; k <= samples; ++k) times.push_back(std::min(horizon, static_cast<double>(k) * step));
  for (double d : discontinuity_times()) times.push_back(d);

  double bias_sup = 0.0;
  for (double t : times) {
    for (bool below : {true, false}) {
      const Vec r = rho(t, below);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!(r[j] > 0.0 && r[j] <= 1.0 + kRhoSlack)) {
          std::ostringstream os;
          os << "fault: rho_" << (j + 1) << "(" << t << ") = " << r[j] << " outside (0, 1]";
          throw ValidationError(os.str());
        }
      }
    }
    const double b = norm(upsilon(t));
    if (!std::isfinite(b)) throw ValidationError("fault: bias is not finite");
    bias_sup = std::max(bias_sup, b);
  }
  return bias_sup;
}

Vec apply_fault(std::span<const double> u, double t, const FaultProfile& profile, bool from_below) {
  if (u.size() != profile.inputs()) throw ValidationError("apply_fault: input dimension mismatch");
  const Vec r = profile.rho(t, from_below);
  const Vec b = profile.upsilon(t);
  Vec ua(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(r[j] > 0.0 && r[j] <= 1.0 + kRhoSlack)) {
      throw ValidationError("apply_fault: rho_" + std::to_string(j + 1) + " outside (0, 1]");
    }
    ua[j] = r[j] * u[j] + b[j];
  }
  return ua;
}

}  // namespace ppfc
