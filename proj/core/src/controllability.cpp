#include "ppfc/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

// Rank test on A A^T for decompose_gain.
constexpr double kRankTolerance = 1e-12;

Definiteness finish(Mat X) {
  Definiteness out;
  // G(i,j) and G(j,i) are the same two summands, so G is exactly symmetric.
  out.G = X + X.transpose();
  out.min_eig = sym_eig_min(out.G);
  out.is_pd = out.min_eig > 0.0;
  return out;
}

}  // namespace

Definiteness check_square(const Mat& g, const Mat& P) {
  if (!g.is_square() || !P.is_square() || g.rows() != P.rows()) {
    throw ValidationError("check_square: g and P must be n x n of equal size");
  }
  return finish(P * g);
}

Definiteness check_nonsquare(const Mat& g, std::span<const double> rho, const Mat& A, const Mat& P) {
  const std::size_t n = g.rows();
  const std::size_t m = g.cols();
  if (A.rows() != n || A.cols() != m) throw ValidationError("check_nonsquare: A must match g (n x m)");
  if (rho.size() != m) throw ValidationError("check_nonsquare: rho needs m diagonal entries");
  if (!P.is_square() || P.rows() != n) throw ValidationError("check_nonsquare: P must be n x n");
  return finish(P * g * Mat::diag(rho) * A.transpose());
}

const char* to_string(AuxFamily family) {
  switch (family) {
    case AuxFamily::kConstant: return "constant";
    case AuxFamily::kDiagonalTimeVarying: return "diagonal-time-varying";
    case AuxFamily::kGeneral: return "general";
  }
  return "general";
}

AuxFamily aux_family_from_string(const std::string& text) {
  if (text == "constant") return AuxFamily::kConstant;
  if (text == "diagonal-time-varying") return AuxFamily::kDiagonalTimeVarying;
  if (text == "general") return AuxFamily::kGeneral;
  throw ValidationError("unknown auxiliary matrix family '" + text +
                        "' (constant | diagonal-time-varying | general)");
}

AuxMatrixCandidate::AuxMatrixCandidate(std::vector<std::vector<TimeExpr>> entries, AuxFamily family,
                                       std::size_t level)
    : entries_(std::move(entries)), family_(family), level_(level) {
  const std::size_t n = entries_.size();
  if (n == 0) throw ValidationError("auxiliary matrix: empty");
  if (level_ == 0) throw ValidationError("auxiliary matrix: level is 1-based");
  bool diagonal = true;
  bool constant = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (entries_[i].size() != n) throw ValidationError("auxiliary matrix: must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const TimeExpr& e = entries_[i][j];
      constant = constant && e.is_constant();
      if (i != j && !e.is_zero()) diagonal = false;
    }
  }
  if (family_ == AuxFamily::kConstant && !constant) {
    throw ValidationError("auxiliary matrix: family 'constant' but an entry depends on t");
  }
  if (family_ == AuxFamily::kDiagonalTimeVarying && !diagonal) {
    throw ValidationError("auxiliary matrix: family 'diagonal-time-varying' but an off-diagonal entry is nonzero");
  }
  if (level_ == 1 && !diagonal) throw ValidationError("auxiliary matrix: level 1 requires a diagonal P");
}

AuxMatrixCandidate AuxMatrixCandidate::constant(const Mat& P, std::size_t level) {
  if (!P.is_square()) throw ValidationError("auxiliary matrix: must be square");
  std::vector<std::vector<TimeExpr>> entries(P.rows());
  for (std::size_t i = 0; i < P.rows(); ++i)
    for (std::size_t j = 0; j < P.cols(); ++j) entries[i].emplace_back(P(i, j));
  return AuxMatrixCandidate(std::move(entries), AuxFamily::kConstant, level);
}

Mat AuxMatrixCandidate::eval(double t) const {
  const std::size_t n = entries_.size();
  Mat P(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) P(i, j) = entries_[i][j].eval(t);
  return P;
}

void GridSpec::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) throw ValidationError("grid: need finite t0 <= t1");
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("grid: step must be > 0");
  for (const Vec& x : states)
    if (!all_finite(x)) throw ValidationError("grid: state samples must be finite");
  if (random) {
    if (random->lo.size() != random->hi.size()) throw ValidationError("grid: random box bounds differ in size");
    for (std::size_t i = 0; i < random->lo.size(); ++i)
      if (!(random->lo[i] <= random->hi[i])) throw ValidationError("grid: random box needs lo <= hi");
    if (!states.empty() && !random->lo.empty() && states.front().size() != random->lo.size()) {
      throw ValidationError("grid: random box and explicit states differ in dimension");
    }
  }
}

std::vector<double> GridSpec::times() const {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  out.reserve(count + 2);
  for (std::size_t k = 0; k <= count; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    if (t > t1) break;
    out.push_back(t);
  }
  if (out.empty() || out.back() < t1) out.push_back(t1);
  return out;
}

std::vector<Vec> GridSpec::state_samples() const {
  std::vector<Vec> out = states;
  if (random && random->count > 0) {
    std::mt19937_64 rng(random->seed);
    for (std::size_t k = 0; k < random->count; ++k) {
      Vec x(random->lo.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::uniform_real_distribution<double> dist(random->lo[i], random->hi[i]);
        x[i] = dist(rng);
      }
      out.push_back(std::move(x));
    }
  }
  if (out.empty()) out.emplace_back();
  return out;
}

SweepReport sweep(const ControllabilityProblem& problem, const AuxMatrixCandidate& candidate,
                  const GridSpec& grid, double margin) {
  if (!problem.gain) throw ValidationError("sweep: gain provider missing");
  grid.validate();
  SweepReport report;
  report.margin = margin;
  report.min_eig = INFINITY;
  report.aux_min_eig = INFINITY;

  const std::vector<double> times = grid.times();
  const std::vector<Vec> states = grid.state_samples();
  for (const Vec& x : states) {
    for (double t : times) {
      const Mat g = problem.gain(x, t);
      const Mat P = candidate.eval(t);
      if (max_abs_asymmetry(P) > tol::kSymmetry) {
        report.aux_pd = false;
        report.message = "auxiliary matrix not symmetric at t=" + std::to_string(t);
        report.aux_min_eig = -INFINITY;
        continue;
      }
      report.aux_min_eig = std::min(report.aux_min_eig, sym_eig_min(P));

      Vec rho(g.cols(), 1.0);
      if (!problem.rho.empty()) rho = eval_exprs(problem.rho, t);
      const Mat A = problem.A.empty() ? Mat::identity(g.rows()) : problem.A;
      const Definiteness d = check_nonsquare(g, rho, A, P);
      ++report.samples;
      // Strict < keeps the first witness on ties, so the report does not
      // depend on anything but sample order.
      if (d.min_eig < report.min_eig) {
        report.min_eig = d.min_eig;
        report.witness_t = t;
        report.witness_state = x;
        report.witness_G = d.G;
      }
    }
  }
  if (report.aux_min_eig <= 0.0) report.aux_pd = false;
  report.pass = report.aux_pd && report.samples > 0 && report.min_eig > margin;
  if (report.message.empty() && !report.aux_pd) report.message = "auxiliary matrix not positive definite on the grid";
  return report;
}

GainDecomposition decompose_gain(const Mat& g, const Mat& A) {
  if (A.rows() != g.rows()) throw ValidationError("decompose_gain: A and g need the same row count");
  if (A.rows() > A.cols()) throw ValidationError("decompose_gain: A must have at least as many columns as rows");
  const Mat At = A.transpose();
  const Mat AAt = A * At;
  if (sym_eig_min(AAt) <= kRankTolerance * std::max(1.0, sym_eig_max(AAt))) {
    throw ValidationError("decompose_gain: A is rank deficient");
  }
  GainDecomposition out;
  out.b = At * solve(AAt, g);
  out.residual = frobenius_norm(A * out.b - g);
  return out;
}

}  // namespace ppfc
