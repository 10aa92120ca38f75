#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppfc/matcore.hpp"
#include "ppfc/time_expr.hpp"

namespace ppfc {

struct Definiteness {
  bool is_pd = false;
  double min_eig = 0.0;
  Mat G;
};

/// G = P g + g^T P.
Definiteness check_square(const Mat& g, const Mat& P);
/// G = P g rho A^T + A rho g^T P, rho given as its diagonal.
Definiteness check_nonsquare(const Mat& g, std::span<const double> rho, const Mat& A, const Mat& P);

enum class AuxFamily { kConstant, kDiagonalTimeVarying, kGeneral };
const char* to_string(AuxFamily family);
AuxFamily aux_family_from_string(const std::string& text);

/// Analytic P(t) candidate. Entries are time expressions; the family label
/// is checked against the entries, and level 1 candidates must be diagonal.
class AuxMatrixCandidate {
 public:
  AuxMatrixCandidate() = default;
  AuxMatrixCandidate(std::vector<std::vector<TimeExpr>> entries, AuxFamily family, std::size_t level = 1);

  static AuxMatrixCandidate constant(const Mat& P, std::size_t level = 1);

  std::size_t size() const noexcept { return entries_.size(); }
  AuxFamily family() const noexcept { return family_; }
  std::size_t level() const noexcept { return level_; }
  const std::vector<std::vector<TimeExpr>>& entries() const noexcept { return entries_; }

  Mat eval(double t) const;

 private:
  std::vector<std::vector<TimeExpr>> entries_;
  AuxFamily family_ = AuxFamily::kConstant;
  std::size_t level_ = 1;
};

struct RandomBox {
  Vec lo;
  Vec hi;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct GridSpec {
  double t0 = 0.0;
  double t1 = 0.0;
  double step = 0.01;
  std::vector<Vec> states;
  std::optional<RandomBox> random;

  void validate() const;
  /// t0 + k*step up to t1, with t1 appended. Halving the step gives a superset.
  std::vector<double> times() const;
  /// Explicit states followed by the random draws; a single empty state if neither.
  std::vector<Vec> state_samples() const;
};

using GainProvider = std::function<Mat(std::span<const double> x, double t)>;

struct ControllabilityProblem {
  GainProvider gain;
  std::vector<TimeExpr> rho;  // diagonal; empty means identity
  Mat A;                      // empty means square check (A = I)
};

struct SweepReport {
  bool pass = false;
  double min_eig = 0.0;
  double witness_t = 0.0;
  Vec witness_state;
  Mat witness_G;
  std::size_t samples = 0;
  bool aux_pd = true;          // P symmetric PD at every sample
  double aux_min_eig = 0.0;
  double margin = 0.0;
  std::string message;
};

/// Min-reduction of the definiteness check over every (state, time) sample.
/// PASS iff P is symmetric PD everywhere and the smallest eigenvalue of G
/// exceeds the margin.
SweepReport sweep(const ControllabilityProblem& problem, const AuxMatrixCandidate& candidate,
                  const GridSpec& grid, double margin = 1e-9);

struct GainDecomposition {
  Mat b;
  double residual = 0.0;
};

/// Minimum-norm right inverse: b = A^T (A A^T)^-1 g.
GainDecomposition decompose_gain(const Mat& g, const Mat& A);

}  // namespace ppfc
