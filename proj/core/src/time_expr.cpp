#include "ppfc/time_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

using Kind = TimeExpr::Term::Kind;

// n-th derivative of tanh(u) w.r.t. u, as a polynomial in T = tanh(u).
double tanh_derivative(double u, int order) {
  std::vector<double> p{0.0, 1.0};  // p(T) = T
  for (int k = 0; k < order; ++k) {
    // d/du p(T) = p'(T) (1 - T^2)
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
    std::vector<double> next(dp.size() + 2, 0.0);
    for (std::size_t i = 0; i < dp.size(); ++i) {
      next[i] += dp[i];
      next[i + 2] -= dp[i];
    }
    p = std::move(next);
  }
  const double T = std::tanh(u);
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * T + p[i];
  return acc;
}

double term_value(const TimeExpr::Term& term, double t, int order) {
  const double u = term.rate * t + term.phase;
  const double a_k = std::pow(term.rate, order);
  switch (term.kind) {
    case Kind::kConst:
      return order == 0 ? term.coef : 0.0;
    case Kind::kLinear:
      if (order == 0) return term.coef * t;
      return order == 1 ? term.coef : 0.0;
    case Kind::kSin:
      return term.coef * a_k * std::sin(u + order * std::numbers::pi / 2.0);
    case Kind::kCos:
      return term.coef * a_k * std::cos(u + order * std::numbers::pi / 2.0);
    case Kind::kTanh:
      return term.coef * a_k * tanh_derivative(u, order);
    case Kind::kExp:
      return term.coef * a_k * std::exp(u);
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<TimeExpr::Term> parse() {
    std::vector<TimeExpr::Term> terms;
    skip_ws();
    if (at_end()) fail("empty expression");
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') sign = take() == '-' ? -1.0 : 1.0;
    terms.push_back(parse_term(sign));
    while (true) {
      skip_ws();
      if (at_end()) break;
      const char c = take();
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      terms.push_back(parse_term(c == '-' ? -1.0 : 1.0));
    }
    return terms;
  }

 private:
  TimeExpr::Term parse_term(double sign) {
    TimeExpr::Term term;
    term.coef = sign;
    bool have_atom = false;
    while (true) {
      skip_ws();
      if (at_end()) fail("expected a factor");
      if (peek() == '-') {  // "-0.1*t" inside a term after '*' is not allowed; sign only leads
        fail("unexpected '-'");
      }
      if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
        term.coef *= parse_number();
      } else {
        if (have_atom) fail("at most one function of t per term");
        parse_atom(term);
        have_atom = true;
      }
      skip_ws();
      if (!at_end() && peek() == '*') {
        take();
        continue;
      }
      break;
    }
    if (!have_atom) term.kind = Kind::kConst;
    return term;
  }

  void parse_atom(TimeExpr::Term& term) {
    const std::size_t start = pos_;
    while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") {
      term.kind = Kind::kLinear;
      return;
    }
    if (name == "pi") {
      term.coef *= std::numbers::pi;
      term.kind = Kind::kConst;
      return;
    }
    if (name == "sin") term.kind = Kind::kSin;
    else if (name == "cos") term.kind = Kind::kCos;
    else if (name == "tanh") term.kind = Kind::kTanh;
    else if (name == "exp") term.kind = Kind::kExp;
    else fail("unknown identifier '" + std::string(name) + "'");
    skip_ws();
    if (at_end() || take() != '(') fail("expected '('");
    parse_linear(term.rate, term.phase);
    skip_ws();
    if (at_end() || take() != ')') fail("expected ')'");
  }

  // Affine function of t: sum of signed items c, c*t, t.
  void parse_linear(double& rate, double& phase) {
    rate = 0.0;
    phase = 0.0;
    skip_ws();
    double sign = 1.0;
    if (!at_end() && (peek() == '+' || peek() == '-')) sign = take() == '-' ? -1.0 : 1.0;
    while (true) {
      double coef = sign;
      bool has_t = false;
      while (true) {
        skip_ws();
        if (at_end()) fail("unterminated argument");
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
          coef *= parse_number();
        } else if (peek() == 't') {
          if (has_t) fail("argument must be affine in t");
          take();
          has_t = true;
        } else if (text_.substr(pos_, 2) == "pi") {
          pos_ += 2;
          coef *= std::numbers::pi;
        } else {
          fail("unexpected character in argument");
        }
        skip_ws();
        if (!at_end() && peek() == '*') {
          take();
          continue;
        }
        break;
      }
      (has_t ? rate : phase) += coef;
      skip_ws();
      if (!at_end() && (peek() == '+' || peek() == '-')) {
        sign = take() == '-' ? -1.0 : 1.0;
        continue;
      }
      break;
    }
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      const bool exp_sign = (c == '+' || c == '-') && pos_ > start &&
                            (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return value;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() { return text_[pos_++]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError("expression '" + std::string(text_) + "': " + why + " at position " +
                          std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeExpr::TimeExpr(double constant) : terms_{Term{Kind::kConst, constant, 0.0, 0.0}} {}

TimeExpr::TimeExpr(std::vector<Term> terms, std::string source)
    : terms_(std::move(terms)), source_(std::move(source)) {}

TimeExpr TimeExpr::parse(std::string_view text) {
  return TimeExpr(Parser(text).parse(), std::string(text));
}

double TimeExpr::eval(double t, int order) const {
  if (order < 0) throw ValidationError("TimeExpr::eval: negative derivative order");
  double acc = 0.0;
  for (const auto& term : terms_) acc += term_value(term, t, order);
  return acc;
}

bool TimeExpr::is_constant() const {
  for (const auto& term : terms_) {
    if (term.coef == 0.0 || term.kind == Kind::kConst) continue;
    if (term.kind != Kind::kLinear && term.rate == 0.0) continue;
    return false;
  }
  return true;
}

bool TimeExpr::is_zero() const { return is_constant() && eval(0.0) == 0.0; }

std::string TimeExpr::to_string() const {
  if (!source_.empty()) return source_;
  std::ostringstream os;
  os.precision(17);
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& term : terms_) {
    if (!first) os << " + ";
    first = false;
    os << term.coef;
    switch (term.kind) {
      case Kind::kConst: break;
      case Kind::kLinear: os << "*t"; break;
      case Kind::kSin: os << "*sin(" << term.rate << "*t + " << term.phase << ")"; break;
      case Kind::kCos: os << "*cos(" << term.rate << "*t + " << term.phase << ")"; break;
      case Kind::kTanh: os << "*tanh(" << term.rate << "*t + " << term.phase << ")"; break;
      case Kind::kExp: os << "*exp(" << term.rate << "*t + " << term.phase << ")"; break;
    }
  }
  return os.str();
}

std::vector<TimeExpr> parse_exprs(const std::vector<std::string>& texts) {
  std::vector<TimeExpr> out;
  out.reserve(texts.size());
  for (const auto& s : texts) out.push_back(TimeExpr::parse(s));
  return out;
}

std::vector<double> eval_exprs(const std::vector<TimeExpr>& exprs, double t, int order) {
  std::vector<double> out(exprs.size());
  for (std::size_t i = 0; i < exprs.size(); ++i) out[i] = exprs[i].eval(t, order);
  return out;
}

}  // namespace ppfc
