#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ppfc {

/// Scalar function of time from a small closed grammar: a sum of terms
///   c, c*t, c*sin(a*t+b), c*cos(a*t+b), c*tanh(a*t+b), c*exp(a*t+b)
/// with exact derivatives of any order. Used for reference trajectories,
/// fault profiles, disturbances and auxiliary-matrix candidates.
///
/// Text form: "0.7 + 0.1*sin(t)", "3*exp(-0.1*t+1)", "0.02*tanh(2*t)".
class TimeExpr {
 public:
  struct Term {
    enum class Kind { kConst, kLinear, kSin, kCos, kTanh, kExp };
    Kind kind = Kind::kConst;
    double coef = 0.0;
    double rate = 1.0;
    double phase = 0.0;
  };

  TimeExpr() = default;
  explicit TimeExpr(double constant);
  explicit TimeExpr(std::vector<Term> terms, std::string source = {});

  /// Throws ValidationError with the offending position on a syntax error.
  static TimeExpr parse(std::string_view text);

  double eval(double t, int order = 0) const;
  bool is_constant() const;
  bool is_zero() const;
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// Original text when parsed, otherwise a canonical rendering.
  std::string to_string() const;

 private:
  std::vector<Term> terms_;
  std::string source_;
};

std::vector<TimeExpr> parse_exprs(const std::vector<std::string>& texts);
std::vector<double> eval_exprs(const std::vector<TimeExpr>& exprs, double t, int order = 0);

}  // namespace ppfc
