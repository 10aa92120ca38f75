#include "ppfc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "ppfc/errors.hpp"

namespace ppfc {

namespace {

// ---------------------------------------------------------------------------
// Builtin documents.

constexpr const char* kQuadrotorA = R"json({
  "name": "quadrotor-a",
  "plant": {
    "type": "quadrotor",
    "Mxx": 0.021, "Myy": 0.021, "Mzz": 0.039,
    "disturbance": ["0.02*sin(t)", "0.02*cos(t)", "tanh(t)"]
  },
  "controller": {
    "steps": [
      {"kappa": 1, "sigma": 0.01, "mu": 0.1},
      {"kappa": 1, "sigma": 0.01, "mu": 0.1}
    ],
    "allocation": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "jacobian_step": 1e-6
  },
  "performance": {
    "delta_lo": [1, 1, 1], "delta_hi": [1, 1, 1],
    "l": [0.9936, 0.9936, 0.9936],
    "phi0": [1, 1, 1], "phif": [0.1, 0.1, 0.1],
    "gamma": 0.9
  },
  "fault": {
    "segments": [
      {"rho": ["1-0.1*sin(t)", "1-0.2*tanh(t)", "0.9+0.1*cos(t)"], "until": 3},
      {"rho": ["0.8+0.05*sin(t)", "0.8+0.02*tanh(0.5*t)", "0.8+0.2*cos(t)"]}
    ],
    "bias": ["0.02*tanh(2*t)", "0.02*cos(t)", "0.02*sin(3*t)"]
  },
  "reference": ["cos(t)", "sin(2*t)", "0.1*tanh(t)"],
  "initial": {"x": [[0.5, 0.5, 0.5], [0, 0, 0]], "theta": [0, 0]},
  "sim": {"t_final": 20, "dt": 0.001, "log_stride": 10, "open_loop": false}
})json";

// The reference's first channel is scaled by 0.5 so that both initial
// conditions start inside the asymmetric funnels.
constexpr const char* kSpacecraftSym = R"json({
  "name": "spacecraft-sym",
  "plant": {
    "type": "spacecraft",
    "J0": [[20, 1.2, 0.9], [1.2, 5, 1.4], [0.9, 1.4, 5]],
    "Ju": ["0.2*exp(-0.2*t)", "2*exp(-0.1*t)", "3*exp(-0.1*t+1)"],
    "D": [[1, 0, 0, 0.5773502691896258],
          [0, 1, 0, 0.5773502691896258],
          [0, 0, 1, 0.5773502691896258]],
    "disturbance": ["0.02*sin(t)", "0.02*cos(t)", "0.02*sin(2*t)"]
  },
  "controller": {
    "steps": [{"kappa": 1, "sigma": 0.01, "mu": 0.1}],
    "allocation": [[1, 0, 0, 0.5773502691896258],
                   [0, 1, 0, 0.5773502691896258],
                   [0, 0, 1, 0.5773502691896258]],
    "jacobian_step": 1e-6
  },
  "performance": {
    "delta_lo": [1, 1, 1], "delta_hi": [1, 1, 1],
    "l": [0.9936, 0.9936, 0.9936],
    "phi0": [1, 1, 1], "phif": [0.1, 0.1, 0.1],
    "gamma": 0.9
  },
  "fault": {
    "segments": [
      {"rho": ["0.5+0.2*sin(t)", "0.6-0.2*tanh(t)", "0.4+0.2*cos(t)", "0.3-0.1*tanh(t)"], "until": 3},
      {"rho": ["0.1-0.08*sin(t)", "0.2-0.17*sin(t)", "0.2-0.15*sin(t)", "0.2+0.18*sin(t)"]}
    ],
    "bias": ["0.01*tanh(2*t)", "0.01*cos(t)", "0.01*sin(3*t)", "0.01*cos(2*t)"]
  },
  "reference": ["0.5*cos(t)", "sin(2*t)", "0.1*tanh(t)"],
  "initial": {"x": [[-0.5, -0.5, -0.5]], "theta": [0]},
  "sim": {"t_final": 20, "dt": 0.001, "log_stride": 10, "open_loop": false}
})json";

// Template for plant.type "chain"; not listed as a builtin.
constexpr const char* kChainTemplate = R"json({
  "name": "chain",
  "plant": {"type": "chain", "channels": 2, "depth": 2, "lambda": 0},
  "controller": {
    "steps": [
      {"kappa": 1, "sigma": 0.01, "mu": 0.1},
      {"kappa": 1, "sigma": 0.01, "mu": 0.1}
    ],
    "allocation": [[1, 0], [0, 1]],
    "jacobian_step": 1e-6
  },
  "performance": {
    "delta_lo": [1, 1], "delta_hi": [1, 1],
    "l": [0.9936, 0.9936],
    "phi0": [1, 1], "phif": [0.1, 0.1],
    "gamma": 0.9
  },
  "fault": {"segments": [{"rho": [1, 1]}], "bias": [0, 0]},
  "reference": ["0.5*sin(t)", "0.2*cos(t)"],
  "initial": {"x": [[0.2, 0.1], [0, 0]], "theta": [0, 0]},
  "sim": {"t_final": 5, "dt": 0.001, "log_stride": 10, "open_loop": false}
})json";

constexpr const char* kExample1Identity = R"json({
  "name": "example1-identity",
  "description": "square gain [[2,1],[5,3]] with P = I",
  "level": 1,
  "gain": {"type": "matrix", "entries": [[2, 1], [5, 3]]},
  "P": {"family": "constant", "entries": [[1, 0], [0, 1]]},
  "grid": {"t0": 0, "t1": 0, "step": 1},
  "margin": 1e-9
})json";

constexpr const char* kExample1Aux = R"json({
  "name": "example1-aux",
  "description": "square gain [[2,1],[5,3]] with P = diag(3, 1)",
  "level": 1,
  "gain": {"type": "matrix", "entries": [[2, 1], [5, 3]]},
  "P": {"family": "constant", "entries": [[3, 0], [0, 1]]},
  "grid": {"t0": 0, "t1": 0, "step": 1},
  "margin": 1e-9
})json";

constexpr const char* kExample2Unaided = R"json({
  "name": "example2-unaided",
  "description": "spacecraft g = J^-1 D under degraded wheels, A = D, P = I",
  "level": 1,
  "gain": {
    "type": "spacecraft",
    "J": [[20, 1.2, 0.9], [1.2, 5, 1.4], [0.9, 1.4, 5]],
    "D": [[1, 0, 0, 0.5773502691896258],
          [0, 1, 0, 0.5773502691896258],
          [0, 0, 1, 0.5773502691896258]]
  },
  "rho": ["0.1-0.08*sin(t)", "0.2-0.17*sin(t)", "0.2-0.15*sin(t)", "0.2+0.18*sin(t)"],
  "A": [[1, 0, 0, 0.5773502691896258],
        [0, 1, 0, 0.5773502691896258],
        [0, 0, 1, 0.5773502691896258]],
  "P": {"family": "constant", "entries": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
  "grid": {"t0": 0, "t1": 6.283185307179586, "step": 0.01},
  "margin": 1e-9
})json";

const std::map<std::string, std::function<json()>>& scenario_registry() {
  static const std::map<std::string, std::function<json()>> registry = {
      {"quadrotor-a", [] { return json::parse(kQuadrotorA); }},
      {"quadrotor-b",
       [] {
         json j = json::parse(kQuadrotorA);
         j["name"] = "quadrotor-b";
         j["initial"]["x"][0] = {1.2, -0.5, -0.5};
         return j;
       }},
      {"spacecraft-sym", [] { return json::parse(kSpacecraftSym); }},
      {"spacecraft-asym-lo",
       [] {
         json j = json::parse(kSpacecraftSym);
         j["name"] = "spacecraft-asym-lo";
         j["performance"]["delta_lo"] = {0.8, 0.8, 0.8};
         return j;
       }},
      {"spacecraft-asym-hi",
       [] {
         json j = json::parse(kSpacecraftSym);
         j["name"] = "spacecraft-asym-hi";
         j["performance"]["delta_hi"] = {0.6, 0.6, 0.6};
         return j;
       }},
  };
  return registry;
}

const std::map<std::string, std::function<json()>>& check_registry() {
  static const std::map<std::string, std::function<json()>> registry = {
      {"example1-identity", [] { return json::parse(kExample1Identity); }},
      {"example1-aux", [] { return json::parse(kExample1Aux); }},
      {"example2-unaided", [] { return json::parse(kExample2Unaided); }},
      {"example2-aux",
       [] {
         json j = json::parse(kExample2Unaided);
         j["name"] = "example2-aux";
         j["description"] = "spacecraft g = J^-1 D under degraded wheels, A = D, P = diag(0.7+0.1 sin t, 0.1, 0.6+0.1 cos t)";
         j["P"] = {{"family", "diagonal-time-varying"},
                   {"entries", {{"0.7+0.1*sin(t)", 0, 0}, {0, 0.1, 0}, {0, 0, "0.6+0.1*cos(t)"}}}};
         return j;
       }},
  };
  return registry;
}

json default_for_type(const std::string& type) {
  if (type == "quadrotor") return json::parse(kQuadrotorA);
  if (type == "spacecraft") return json::parse(kSpacecraftSym);
  if (type == "chain") return json::parse(kChainTemplate);
  throw ValidationError("plant.type: unknown plant type '" + type + "' (quadrotor | spacecraft | chain)");
}

// ---------------------------------------------------------------------------
// Typed readers. Every error names the dotted key.

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!obj.is_object()) fail(path.empty() ? "document" : path, "expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ValidationError("unknown key '" + join(path, item.key()) + "'");
  }
}

const json& need(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(join(path, key), "missing");
  return obj.at(key);
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

std::size_t read_count(const json& v, const std::string& path, std::size_t min_value) {
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value)) {
    fail(path, "expected an integer >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v.get<long long>());
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool read_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

Vec read_vec(const json& v, const std::string& path, std::size_t expected = 0) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  if (expected != 0 && v.size() != expected) fail(path, "expected " + std::to_string(expected) + " entries");
  Vec out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_number(v[i], join(path, std::to_string(i))));
  return out;
}

// Per-channel values, a single number broadcasting to every channel.
Vec read_channels(const json& v, const std::string& path, std::size_t n) {
  if (v.is_number()) return Vec(n, read_number(v, path));
  return read_vec(v, path, n);
}

Mat read_mat(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows.push_back(read_vec(v[i], join(path, std::to_string(i))));
    if (rows.back().empty() || rows.back().size() != rows.front().size()) {
      fail(join(path, std::to_string(i)), "rows must be non-empty and of equal length");
    }
  }
  return Mat::from_rows(rows);
}

TimeExpr read_expr(const json& v, const std::string& path) {
  if (v.is_number()) return TimeExpr(read_number(v, path));
  if (!v.is_string()) fail(path, "expected an expression string or a number");
  try {
    return TimeExpr::parse(v.get<std::string>());
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

std::vector<TimeExpr> read_exprs(const json& v, const std::string& path, std::size_t expected = 0) {
  if (!v.is_array()) fail(path, "expected an array of expressions");
  if (expected != 0 && v.size() != expected) fail(path, "expected " + std::to_string(expected) + " entries");
  std::vector<TimeExpr> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_expr(v[i], join(path, std::to_string(i))));
  return out;
}

std::vector<std::vector<TimeExpr>> read_expr_mat(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  std::vector<std::vector<TimeExpr>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_exprs(v[i], join(path, std::to_string(i))));
    if (out.back().size() != out.front().size()) fail(join(path, std::to_string(i)), "rows must have equal length");
  }
  return out;
}

Mat eval_expr_mat(const std::vector<std::vector<TimeExpr>>& entries, double t) {
  Mat out(entries.size(), entries.front().size());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = entries[i][j].eval(t);
  return out;
}

// Re-throws library validation errors under the section's name.
template <typename F>
auto in_section(const std::string& section, F&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(section + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Resolved document -> Scenario.

std::shared_ptr<const PlantModel> build_plant(const json& p) {
  const std::string path = "plant";
  if (!p.is_object()) fail(path, "expected an object");
  const std::string type = read_string(need(p, "type", path), "plant.type");
  if (type == "quadrotor") {
    check_keys(p, {"type", "Mxx", "Myy", "Mzz", "disturbance"}, path);
    QuadrotorParams q;
    q.Mxx = read_number(need(p, "Mxx", path), "plant.Mxx");
    q.Myy = read_number(need(p, "Myy", path), "plant.Myy");
    q.Mzz = read_number(need(p, "Mzz", path), "plant.Mzz");
    q.disturbance = read_exprs(need(p, "disturbance", path), "plant.disturbance", 3);
    return in_section(path, [&] { return std::make_shared<const QuadrotorPlant>(q); });
  }
  if (type == "spacecraft") {
    check_keys(p, {"type", "J0", "Ju", "D", "disturbance"}, path);
    SpacecraftParams s;
    s.J0 = read_mat(need(p, "J0", path), "plant.J0");
    s.Ju = read_exprs(need(p, "Ju", path), "plant.Ju", 3);
    s.D = read_mat(need(p, "D", path), "plant.D");
    s.disturbance = read_exprs(need(p, "disturbance", path), "plant.disturbance", 3);
    return in_section(path, [&] { return std::make_shared<const SpacecraftPlant>(s); });
  }
  if (type == "chain") {
    check_keys(p, {"type", "channels", "depth", "lambda"}, path);
    const std::size_t n = read_count(need(p, "channels", path), "plant.channels", 1);
    const std::size_t depth = read_count(need(p, "depth", path), "plant.depth", 1);
    const double lambda = read_number(need(p, "lambda", path), "plant.lambda");
    return in_section(path, [&] { return std::make_shared<const ChainPlant>(n, depth, lambda); });
  }
  fail("plant.type", "unknown plant type '" + type + "' (quadrotor | spacecraft | chain)");
}

ControllerConfig build_controller(const json& c) {
  const std::string path = "controller";
  check_keys(c, {"steps", "allocation", "jacobian_step"}, path);
  ControllerConfig cfg;
  const json& steps = need(c, "steps", path);
  if (!steps.is_array() || steps.empty()) fail("controller.steps", "expected a non-empty array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string sp = "controller.steps." + std::to_string(i);
    check_keys(steps[i], {"kappa", "sigma", "mu"}, sp);
    StepGains g;
    if (steps[i].contains("kappa")) g.kappa = read_number(steps[i]["kappa"], sp + ".kappa");
    if (steps[i].contains("sigma")) g.sigma = read_number(steps[i]["sigma"], sp + ".sigma");
    if (steps[i].contains("mu")) g.mu = read_number(steps[i]["mu"], sp + ".mu");
    cfg.steps.push_back(g);
  }
  cfg.allocation = read_mat(need(c, "allocation", path), "controller.allocation");
  if (c.contains("jacobian_step")) cfg.jacobian_step = read_number(c["jacobian_step"], "controller.jacobian_step");
  return cfg;
}

PerformanceSpec build_performance(const json& p, std::size_t n) {
  const std::string path = "performance";
  check_keys(p, {"delta_lo", "delta_hi", "l", "phi0", "phif", "gamma"}, path);
  PerformanceSpec spec;
  spec.delta_lo = read_channels(need(p, "delta_lo", path), "performance.delta_lo", n);
  spec.delta_hi = read_channels(need(p, "delta_hi", path), "performance.delta_hi", n);
  spec.l = read_channels(need(p, "l", path), "performance.l", n);
  spec.phi0 = read_channels(need(p, "phi0", path), "performance.phi0", n);
  spec.phif = read_channels(need(p, "phif", path), "performance.phif", n);
  spec.gamma = read_number(need(p, "gamma", path), "performance.gamma");
  in_section(path, [&] { spec.validate(); return 0; });
  return spec;
}

FaultProfile build_fault(const json& f, std::size_t m) {
  const std::string path = "fault";
  check_keys(f, {"segments", "bias"}, path);
  const json& segs = need(f, "segments", path);
  if (!segs.is_array() || segs.empty()) fail("fault.segments", "expected a non-empty array");
  std::vector<FaultProfile::Segment> segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string sp = "fault.segments." + std::to_string(k);
    check_keys(segs[k], {"rho", "until"}, sp);
    FaultProfile::Segment s;
    s.rho = read_exprs(need(segs[k], "rho", sp), sp + ".rho", m);
    const bool last = k + 1 == segs.size();
    if (segs[k].contains("until")) {
      if (last) fail(sp + ".until", "the last segment has no end time");
      s.until = read_number(segs[k]["until"], sp + ".until");
    } else if (!last) {
      fail(sp + ".until", "missing");
    }
    segments.push_back(std::move(s));
  }
  std::vector<TimeExpr> bias = read_exprs(need(f, "bias", path), "fault.bias", m);
  return in_section(path, [&] { return FaultProfile(std::move(segments), std::move(bias)); });
}

Scenario build_scenario(const json& d) {
  check_keys(d, {"name", "plant", "controller", "performance", "fault", "reference", "initial", "sim"}, "");
  Scenario sc;
  sc.name = d.contains("name") ? read_string(d["name"], "name") : "custom";
  sc.plant = build_plant(need(d, "plant", ""));
  const std::size_t n = sc.plant->outputs();
  const std::size_t m = sc.plant->inputs();
  const std::size_t N = sc.plant->depth();

  sc.controller = build_controller(need(d, "controller", ""));
  if (sc.controller.depth() != N) {
    fail("controller.steps", "expected " + std::to_string(N) + " entries (plant depth)");
  }
  in_section("controller", [&] { sc.controller.validate(n, m); return 0; });
  sc.performance = build_performance(need(d, "performance", ""), n);
  sc.fault = build_fault(need(d, "fault", ""), m);
  sc.reference = ReferenceFamily(read_exprs(need(d, "reference", ""), "reference", n));

  const json& init = need(d, "initial", "");
  check_keys(init, {"x", "theta"}, "initial");
  const json& xs = need(init, "x", "initial");
  if (!xs.is_array() || xs.size() != N) fail("initial.x", "expected " + std::to_string(N) + " state blocks");
  for (std::size_t i = 0; i < N; ++i) {
    const Vec block = read_vec(xs[i], "initial.x." + std::to_string(i), n);
    sc.x0.insert(sc.x0.end(), block.begin(), block.end());
  }
  sc.theta0 = read_vec(need(init, "theta", "initial"), "initial.theta", N);
  for (std::size_t i = 0; i < N; ++i)
    if (sc.theta0[i] < 0.0) fail("initial.theta." + std::to_string(i), "must be >= 0");

  const json& sim = need(d, "sim", "");
  check_keys(sim, {"t_final", "dt", "log_stride", "open_loop"}, "sim");
  sc.sim.t_final = read_number(need(sim, "t_final", "sim"), "sim.t_final");
  sc.sim.dt = read_number(need(sim, "dt", "sim"), "sim.dt");
  sc.sim.log_stride = read_count(need(sim, "log_stride", "sim"), "sim.log_stride", 1);
  sc.open_loop = sim.contains("open_loop") && read_bool(sim["open_loop"], "sim.open_loop");
  if (!(sc.sim.t_final > 0.0)) fail("sim.t_final", "must be > 0");
  if (!(sc.sim.dt > 0.0)) fail("sim.dt", "must be > 0");

  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Scenario -> document.

json mat_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json expr_json(const TimeExpr& e) {
  const auto& terms = e.terms();
  if (terms.empty()) return 0.0;
  // Numbers given as numbers stay numbers so they reload bit-exactly.
  if (terms.size() == 1 && terms[0].kind == TimeExpr::Term::Kind::kConst &&
      e.to_string() == TimeExpr(terms[0].coef).to_string()) {
    return terms[0].coef;
  }
  return e.to_string();
}

json exprs_json(const std::vector<TimeExpr>& exprs) {
  json out = json::array();
  for (const auto& e : exprs) out.push_back(expr_json(e));
  return out;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : scenario_registry()) out.push_back(name);
  return out;
}

std::vector<std::string> builtin_check_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : check_registry()) out.push_back(name);
  return out;
}

bool is_builtin_scenario(const std::string& name) { return scenario_registry().count(name) != 0; }
bool is_builtin_check(const std::string& name) { return check_registry().count(name) != 0; }

json builtin_scenario_json(const std::string& name) {
  const auto it = scenario_registry().find(name);
  if (it == scenario_registry().end()) throw ValidationError("unknown builtin scenario '" + name + "'");
  return it->second();
}

json builtin_check_json(const std::string& name) {
  const auto it = check_registry().find(name);
  if (it == check_registry().end()) throw ValidationError("unknown builtin check '" + name + "'");
  return it->second();
}

json resolve_scenario_json(const json& doc) {
  check_keys(doc, {"name", "base", "plant", "controller", "performance", "fault", "reference", "initial", "sim"}, "");
  std::string base_name;
  if (doc.contains("base")) {
    base_name = read_string(doc["base"], "base");
    if (!is_builtin_scenario(base_name)) fail("base", "unknown builtin scenario '" + base_name + "'");
  }
  std::string type;
  if (doc.contains("plant")) {
    if (!doc["plant"].is_object()) fail("plant", "expected an object");
    if (doc["plant"].contains("type")) type = read_string(doc["plant"]["type"], "plant.type");
  }

  json merged;
  if (!base_name.empty()) {
    merged = builtin_scenario_json(base_name);
    if (!type.empty() && type != merged["plant"]["type"].get<std::string>()) {
      fail("plant.type", "'" + type + "' conflicts with base '" + base_name + "'");
    }
  } else if (!type.empty()) {
    merged = default_for_type(type);
  } else {
    fail("plant.type", "required when no base is given");
  }

  json patch = doc;
  patch.erase("base");
  if (!patch.contains("name")) patch["name"] = base_name.empty() ? "custom" : base_name;
  merged.merge_patch(patch);
  (void)build_scenario(merged);
  return merged;
}

Scenario scenario_from_json(const json& doc) {
  return build_scenario(resolve_scenario_json(doc));
}

json scenario_to_json(const Scenario& sc) {
  json d;
  d["name"] = sc.name;
  if (const auto* q = dynamic_cast<const QuadrotorPlant*>(sc.plant.get())) {
    const QuadrotorParams& p = q->params();
    d["plant"] = {{"type", "quadrotor"}, {"Mxx", p.Mxx}, {"Myy", p.Myy}, {"Mzz", p.Mzz},
                  {"disturbance", exprs_json(p.disturbance)}};
  } else if (const auto* s = dynamic_cast<const SpacecraftPlant*>(sc.plant.get())) {
    const SpacecraftParams& p = s->params();
    d["plant"] = {{"type", "spacecraft"}, {"J0", mat_json(p.J0)}, {"Ju", exprs_json(p.Ju)},
                  {"D", mat_json(p.D)}, {"disturbance", exprs_json(p.disturbance)}};
  } else if (const auto* c = dynamic_cast<const ChainPlant*>(sc.plant.get())) {
    d["plant"] = {{"type", "chain"}, {"channels", c->outputs()}, {"depth", c->depth()}, {"lambda", c->lambda()}};
  } else {
    throw ValidationError("scenario_to_json: plant '" + sc.plant->name() + "' has no file form");
  }

  json steps = json::array();
  for (const StepGains& g : sc.controller.steps) steps.push_back({{"kappa", g.kappa}, {"sigma", g.sigma}, {"mu", g.mu}});
  d["controller"] = {{"steps", steps}, {"allocation", mat_json(sc.controller.allocation)},
                     {"jacobian_step", sc.controller.jacobian_step}};

  const PerformanceSpec& p = sc.performance;
  d["performance"] = {{"delta_lo", p.delta_lo}, {"delta_hi", p.delta_hi}, {"l", p.l},
                      {"phi0", p.phi0},         {"phif", p.phif},         {"gamma", p.gamma}};

  json segs = json::array();
  const auto& segments = sc.fault.segments();
  for (std::size_t k = 0; k < segments.size(); ++k) {
    json s = {{"rho", exprs_json(segments[k].rho)}};
    if (k + 1 < segments.size()) s["until"] = segments[k].until;
    segs.push_back(s);
  }
  d["fault"] = {{"segments", segs}, {"bias", exprs_json(sc.fault.bias())}};
  d["reference"] = exprs_json(sc.reference.expressions());

  const std::size_t n = sc.plant->outputs();
  json xs = json::array();
  for (std::size_t i = 0; i < sc.plant->depth(); ++i) {
    xs.push_back(Vec(sc.x0.begin() + static_cast<long>(i * n), sc.x0.begin() + static_cast<long>((i + 1) * n)));
  }
  d["initial"] = {{"x", xs}, {"theta", sc.theta0}};
  d["sim"] = {{"t_final", sc.sim.t_final}, {"dt", sc.sim.dt}, {"log_stride", sc.sim.log_stride},
              {"open_loop", sc.open_loop}};
  return d;
}

void apply_override(json& doc, const std::string& path, const json& value) {
  if (path.empty()) throw ValidationError("override: empty key");
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (node->is_object()) {
      if (!node->contains(key)) throw ValidationError("override: key '" + path + "' does not exist");
      node = &(*node)[key];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      std::size_t used = 0;
      try {
        idx = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || key.empty() || idx >= node->size()) {
        throw ValidationError("override: key '" + path + "' does not exist");
      }
      node = &(*node)[idx];
    } else {
      throw ValidationError("override: key '" + path + "' does not exist");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
}

std::vector<std::pair<std::string, json>> parse_overrides(const std::string& text) {
  std::vector<std::pair<std::string, json>> out;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t semi = text.find(';', start);
    const std::string item = trim(text.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) throw ValidationError("override '" + item + "': expected key=value");
      const std::string key = trim(item.substr(0, eq));
      try {
        out.emplace_back(key, json::parse(item.substr(eq + 1)));
      } catch (const json::parse_error&) {
        throw ValidationError("override '" + key + "': value is not valid JSON");
      }
    }
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

CheckSpec check_from_json(const json& doc) {
  check_keys(doc, {"name", "description", "level", "gain", "rho", "A", "P", "grid", "margin"}, "");
  CheckSpec spec;
  spec.name = doc.contains("name") ? read_string(doc["name"], "name") : "custom";
  if (doc.contains("description")) spec.description = read_string(doc["description"], "description");
  const std::size_t level = doc.contains("level") ? read_count(doc["level"], "level", 1) : 1;

  const json& gain = need(doc, "gain", "");
  if (!gain.is_object()) fail("gain", "expected an object");
  const std::string type = read_string(need(gain, "type", "gain"), "gain.type");
  std::size_t n = 0;
  std::size_t m = 0;
  if (type == "matrix") {
    check_keys(gain, {"type", "entries"}, "gain");
    auto entries = read_expr_mat(need(gain, "entries", "gain"), "gain.entries");
    n = entries.size();
    m = entries.front().size();
    spec.problem.gain = [entries](std::span<const double>, double t) { return eval_expr_mat(entries, t); };
  } else if (type == "spacecraft") {
    check_keys(gain, {"type", "J", "D"}, "gain");
    const Mat J = read_mat(need(gain, "J", "gain"), "gain.J");
    const Mat D = read_mat(need(gain, "D", "gain"), "gain.D");
    if (!J.is_square() || J.rows() != D.rows()) fail("gain.J", "must be square with as many rows as D");
    const Mat g = in_section("gain", [&] { return solve(J, D); });
    n = g.rows();
    m = g.cols();
    spec.problem.gain = [g](std::span<const double>, double) { return g; };
  } else if (type == "quadrotor") {
    check_keys(gain, {"type", "Mxx", "Myy", "Mzz"}, "gain");
    QuadrotorParams q;
    q.Mxx = read_number(need(gain, "Mxx", "gain"), "gain.Mxx");
    q.Myy = read_number(need(gain, "Myy", "gain"), "gain.Myy");
    q.Mzz = read_number(need(gain, "Mzz", "gain"), "gain.Mzz");
    q.disturbance.assign(3, TimeExpr(0.0));
    in_section("gain", [&] { q.validate(); return 0; });
    n = m = 3;
    spec.problem.gain = [q](std::span<const double> x, double) {
      if (x.size() != 3) throw ValidationError("quadrotor gain: state samples must be Euler angles (3 entries)");
      return quad_g2(x, q);
    };
  } else {
    fail("gain.type", "unknown gain type '" + type + "' (matrix | spacecraft | quadrotor)");
  }

  if (doc.contains("rho")) spec.problem.rho = read_exprs(doc["rho"], "rho", m);
  if (doc.contains("A")) {
    spec.problem.A = read_mat(doc["A"], "A");
    if (spec.problem.A.rows() != n || spec.problem.A.cols() != m) {
      fail("A", "expected " + std::to_string(n) + "x" + std::to_string(m));
    }
  } else if (n != m) {
    fail("A", "required for a non-square gain");
  }

  const json& P = need(doc, "P", "");
  check_keys(P, {"family", "entries"}, "P");
  const AuxFamily family = in_section("P.family", [&] {
    return aux_family_from_string(read_string(need(P, "family", "P"), "P.family"));
  });
  auto entries = read_expr_mat(need(P, "entries", "P"), "P.entries");
  if (entries.size() != n) fail("P.entries", "expected " + std::to_string(n) + "x" + std::to_string(n));
  spec.candidate = in_section("P", [&] { return AuxMatrixCandidate(std::move(entries), family, level); });

  const json& grid = need(doc, "grid", "");
  check_keys(grid, {"t0", "t1", "step", "states", "random"}, "grid");
  spec.grid.t0 = read_number(need(grid, "t0", "grid"), "grid.t0");
  spec.grid.t1 = read_number(need(grid, "t1", "grid"), "grid.t1");
  spec.grid.step = read_number(need(grid, "step", "grid"), "grid.step");
  if (grid.contains("states")) {
    const json& states = grid["states"];
    if (!states.is_array()) fail("grid.states", "expected an array of state vectors");
    for (std::size_t i = 0; i < states.size(); ++i)
      spec.grid.states.push_back(read_vec(states[i], "grid.states." + std::to_string(i)));
  }
  if (grid.contains("random")) {
    const json& r = grid["random"];
    check_keys(r, {"lo", "hi", "count", "seed"}, "grid.random");
    RandomBox box;
    box.lo = read_vec(need(r, "lo", "grid.random"), "grid.random.lo");
    box.hi = read_vec(need(r, "hi", "grid.random"), "grid.random.hi", box.lo.size());
    box.count = read_count(need(r, "count", "grid.random"), "grid.random.count", 1);
    box.seed = r.contains("seed") ? read_count(r["seed"], "grid.random.seed", 0) : 0;
    spec.grid.random = box;
  }
  in_section("grid", [&] { spec.grid.validate(); return 0; });
  if (doc.contains("margin")) spec.margin = read_number(doc["margin"], "margin");
  return spec;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": not valid JSON (" + std::string(e.what()) + ")");
  }
}

}  // namespace ppfc
