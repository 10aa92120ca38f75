#include "ppfc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

using json = nlohmann::json;

std::string edge_text(const FunnelEdge& edge) {
  if (edge.unbounded) return edge.as_double() < 0.0 ? "-unbounded" : "unbounded";
  return format_double(edge.value);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0.0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> csv_columns(std::size_t n, std::size_t m, std::size_t N) {
  std::vector<std::string> cols{"t"};
  for (const char* prefix : {"e", "lo", "hi", "s"})
    for (std::size_t j = 1; j <= n; ++j) cols.push_back(prefix + std::to_string(j));
  for (const char* prefix : {"u", "ua"})
    for (std::size_t j = 1; j <= m; ++j) cols.push_back(prefix + std::to_string(j));
  for (std::size_t i = 1; i <= N; ++i) cols.push_back("th" + std::to_string(i));
  return cols;
}

void write_csv(std::ostream& out, const RunRecord& record) {
  const auto cols = csv_columns(record.n, record.m, record.N);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const LogRow& row : record.rows) {
    std::string line = format_double(row.t);
    auto put = [&line](const std::string& s) {
      line += ',';
      line += s;
    };
    for (double v : row.e) put(format_double(v));
    for (const auto& edge : row.lower) put(edge_text(edge));
    for (const auto& edge : row.upper) put(edge_text(edge));
    for (double v : row.s) put(format_double(v));
    for (double v : row.u) put(format_double(v));
    for (double v : row.u_a) put(format_double(v));
    for (double v : row.theta) put(format_double(v));
    out << line << '\n';
  }
}

void write_summary(std::ostream& out, const RunRecord& record) {
  const RunSummary& s = record.summary;
  out << "scenario: " << record.scenario << '\n';
  out << "dimensions: n=" << record.n << " m=" << record.m << " N=" << record.N << '\n';
  out << "status: " << to_string(s.status) << '\n';
  out << "steps: " << s.steps << '\n';
  out << "t_end: " << format_double(s.t_end) << '\n';
  out << "violations: " << s.violations << " (per channel:";
  for (std::size_t v : s.violations_per_channel) out << ' ' << v;
  out << ")\n";
  out << "max_u_norm: " << format_double(s.max_u_norm) << '\n';
  out << "max_ua_norm: " << format_double(s.max_ua_norm) << '\n';
  out << "max_theta: " << format_double(s.max_theta) << '\n';
  out << "all_finite: " << (s.all_finite ? "yes" : "no") << '\n';
  if (s.fail_channel) out << "fail_channel: " << (*s.fail_channel + 1) << '\n';
  if (!s.message.empty()) out << "message: " << s.message << '\n';
}

nlohmann::json summary_json(const RunRecord& record) {
  const RunSummary& s = record.summary;
  json j = {{"scenario", record.scenario},
            {"n", record.n},
            {"m", record.m},
            {"N", record.N},
            {"status", to_string(s.status)},
            {"steps", s.steps},
            {"t_end", s.t_end},
            {"violations", s.violations},
            {"violations_per_channel", s.violations_per_channel},
            {"max_u_norm", finite_or_null(s.max_u_norm)},
            {"max_ua_norm", finite_or_null(s.max_ua_norm)},
            {"max_theta", finite_or_null(s.max_theta)},
            {"all_finite", s.all_finite},
            {"message", s.message}};
  if (s.fail_channel) j["fail_channel"] = *s.fail_channel + 1;
  return j;
}

void write_svg(std::ostream& out, const RunRecord& record, std::size_t channel) {
  if (channel >= record.n) throw ValidationError("write_svg: channel out of range");
  constexpr double kWidth = 640, kHeight = 360, kPad = 48;

  double t_max = 0.0, e_abs = 0.0;
  for (const LogRow& row : record.rows) {
    t_max = std::max(t_max, row.t);
    if (std::isfinite(row.e[channel])) e_abs = std::max(e_abs, std::abs(row.e[channel]));
  }
  if (t_max <= 0.0) t_max = 1.0;
  // Funnel edges start out huge (or unbounded), so the vertical range follows e.
  const double y_lim = 2.0 * e_abs + 0.5;
  auto px = [&](double t) { return kPad + (kWidth - 2 * kPad) * t / t_max; };
  auto py = [&](double y) {
    const double c = std::clamp(y, -y_lim, y_lim);
    return kHeight / 2 - (kHeight / 2 - kPad) * c / y_lim;
  };
  auto polyline = [&](auto value, const char* color, const char* dash) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (*dash) out << " stroke-dasharray=\"" << dash << '"';
    out << " points=\"";
    for (const LogRow& row : record.rows) out << format_double(px(row.t)) << ',' << format_double(py(value(row))) << ' ';
    out << "\"/>\n";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << py(0) << "\" x2=\"" << kWidth - kPad << "\" y2=\"" << py(0)
      << "\" stroke=\"#bbb\"/>\n";
  polyline([&](const LogRow& r) { return r.lower[channel].as_double(); }, "#c0392b", "6 4");
  polyline([&](const LogRow& r) { return r.upper[channel].as_double(); }, "#c0392b", "6 4");
  polyline([&](const LogRow& r) { return r.e[channel]; }, "#1f4e99", "");
  out << "<text x=\"" << kPad << "\" y=\"" << kPad / 2 << "\" font-family=\"sans-serif\" font-size=\"14\">"
      << record.scenario << ": e" << channel + 1 << " and funnel (t in [0, " << format_double(t_max)
      << "], |y| clipped at " << format_double(y_lim) << ")</text>\n";
  out << "</svg>\n";
}

void write_check_report(std::ostream& out, const std::string& name, const SweepReport& r) {
  out << "check: " << name << '\n';
  out << "samples: " << r.samples << '\n';
  out << "min_eig: " << format_double(r.min_eig) << '\n';
  out << "witness_t: " << format_double(r.witness_t) << '\n';
  if (!r.witness_state.empty()) {
    out << "witness_state:";
    for (double v : r.witness_state) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!r.witness_G.empty()) {
    out << "witness_G:";
    for (std::size_t i = 0; i < r.witness_G.rows(); ++i) {
      out << (i ? " ;" : "");
      for (std::size_t j = 0; j < r.witness_G.cols(); ++j) out << ' ' << format_double(r.witness_G(i, j));
    }
    out << '\n';
  }
  out << "aux_min_eig: " << format_double(r.aux_min_eig) << '\n';
  out << "margin: " << format_double(r.margin) << '\n';
  out << "verdict: " << (r.pass ? "PASS" : "FAIL") << '\n';
  if (!r.message.empty()) out << "message: " << r.message << '\n';
}

nlohmann::json check_report_json(const std::string& name, const SweepReport& r) {
  json G = json::array();
  for (std::size_t i = 0; i < r.witness_G.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r.witness_G.cols(); ++j) row.push_back(r.witness_G(i, j));
    G.push_back(row);
  }
  return {{"check", name},
          {"samples", r.samples},
          {"min_eig", finite_or_null(r.min_eig)},
          {"witness_t", r.witness_t},
          {"witness_state", r.witness_state},
          {"witness_G", G},
          {"aux_min_eig", finite_or_null(r.aux_min_eig)},
          {"margin", r.margin},
          {"verdict", r.pass ? "PASS" : "FAIL"},
          {"message", r.message}};
}

}  // namespace ppfc
