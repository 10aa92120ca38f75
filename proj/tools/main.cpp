// ppfc: run closed-loop scenarios, controllability checks and parameter sweeps.
//
// Exit codes: 0 PASS, 2 invalid input, 3 funnel violation, 4 check FAIL,
// 5 numeric error (non-finite state or singular configuration).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ppfc/errors.hpp"
#include "ppfc/report.hpp"
#include "ppfc/scenario.hpp"
#include "ppfc/sim.hpp"

namespace fs = std::filesystem;
using ppfc::json;

namespace {

enum ExitCode : int { kPass = 0, kInvalid = 2, kFunnel = 3, kCheckFail = 4, kNumeric = 5 };

int exit_code(ppfc::RunStatus status) {
  switch (status) {
    case ppfc::RunStatus::kPass: return kPass;
    case ppfc::RunStatus::kFunnelViolation: return kFunnel;
    case ppfc::RunStatus::kNumericError: return kNumeric;
  }
  return kNumeric;
}

struct Common {
  std::string builtin;
  std::string file;
  std::string out;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::uint64_t> seed;
  bool svg = false;
};

void add_common(CLI::App* cmd, Common& c, const char* what) {
  cmd->add_option("file", c.file, std::string(what) + " JSON file");
  cmd->add_option("--builtin,-b", c.builtin, std::string("builtin ") + what + " name");
  cmd->add_option("--out,-o", c.out, "output path");
  cmd->add_option("--dt", c.dt, "integration step [s] (check: grid step)");
  cmd->add_option("--t-final", c.t_final, "horizon [s] (check: grid end time)");
  cmd->add_option("--seed", c.seed, "seed for randomized state grids");
  cmd->add_flag("--svg", c.svg, "write error-vs-funnel plots next to the CSV");
}

json scenario_doc(const Common& c) {
  if (c.builtin.empty() == c.file.empty()) throw ppfc::ValidationError("give exactly one of FILE or --builtin");
  json doc = c.builtin.empty() ? ppfc::load_json_file(c.file) : ppfc::builtin_scenario_json(c.builtin);
  doc = ppfc::resolve_scenario_json(doc);
  if (c.dt) doc["sim"]["dt"] = *c.dt;
  if (c.t_final) doc["sim"]["t_final"] = *c.t_final;
  return doc;
}

fs::path sibling(const fs::path& csv, const std::string& suffix) {
  fs::path p = csv;
  p.replace_filename(csv.stem().string() + suffix);
  return p;
}

void write_outputs(const ppfc::RunRecord& record, const fs::path& csv, bool svg) {
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw ppfc::ValidationError(csv.string() + ": cannot write");
    ppfc::write_csv(f, record);
  }
  {
    std::ofstream f(sibling(csv, ".summary.txt"), std::ios::binary);
    ppfc::write_summary(f, record);
  }
  if (svg) {
    for (std::size_t j = 0; j < record.n; ++j) {
      std::ofstream f(sibling(csv, "_e" + std::to_string(j + 1) + ".svg"), std::ios::binary);
      ppfc::write_svg(f, record, j);
    }
  }
}

int cmd_run(const Common& c) {
  const ppfc::Scenario sc = ppfc::scenario_from_json(scenario_doc(c));
  const ppfc::RunRecord record = ppfc::integrate(sc);
  if (!c.out.empty()) write_outputs(record, c.out, c.svg);
  ppfc::write_summary(std::cout, record);
  return exit_code(record.summary.status);
}

int cmd_check(const Common& c) {
  if (c.builtin.empty() == c.file.empty()) throw ppfc::ValidationError("give exactly one of FILE or --builtin");
  const json doc = c.builtin.empty() ? ppfc::load_json_file(c.file) : ppfc::builtin_check_json(c.builtin);
  ppfc::CheckSpec spec = ppfc::check_from_json(doc);
  if (c.dt) spec.grid.step = *c.dt;
  if (c.t_final) spec.grid.t1 = *c.t_final;
  if (c.seed && spec.grid.random) spec.grid.random->seed = *c.seed;
  const ppfc::SweepReport report = ppfc::sweep(spec.problem, spec.candidate, spec.grid, spec.margin);
  ppfc::write_check_report(std::cout, spec.name, report);
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw ppfc::ValidationError(c.out + ": cannot write");
    f << ppfc::check_report_json(spec.name, report).dump(2) << '\n';
  }
  return report.pass ? kPass : kCheckFail;
}

struct VariantResult {
  std::string label;
  std::string csv;
  int code = kPass;
  std::string status;
  std::size_t violations = 0;
  double max_u = 0.0;
  std::string message;
};

VariantResult run_variant(json doc, const std::string& overrides, const fs::path& csv, bool svg) {
  VariantResult r;
  r.label = overrides.empty() ? "(base)" : overrides;
  r.csv = csv.string();
  try {
    for (const auto& [key, value] : ppfc::parse_overrides(overrides)) ppfc::apply_override(doc, key, value);
    const ppfc::Scenario sc = ppfc::scenario_from_json(doc);
    const ppfc::RunRecord record = ppfc::integrate(sc);
    write_outputs(record, csv, svg);
    r.code = exit_code(record.summary.status);
    r.status = ppfc::to_string(record.summary.status);
    r.violations = record.summary.violations;
    r.max_u = record.summary.max_u_norm;
    r.message = record.summary.message;
  } catch (const ppfc::ValidationError& e) {
    r.code = kInvalid;
    r.status = "INVALID";
    r.message = e.what();
  }
  return r;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& variants, unsigned jobs) {
  const json base = scenario_doc(c);
  const std::string name = base["name"].get<std::string>();
  const fs::path dir = c.out.empty() ? fs::path("sweep-" + name) : fs::path(c.out);
  fs::create_directories(dir);

  std::vector<std::string> list = variants;
  if (list.empty()) list.emplace_back();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  // Variants are independent and write to their own files.
  std::vector<VariantResult> results(list.size());
  for (std::size_t start = 0; start < list.size(); start += jobs) {
    std::vector<std::future<VariantResult>> batch;
    for (std::size_t k = start; k < std::min(list.size(), start + jobs); ++k) {
      const fs::path csv = dir / (list.size() == 1 ? name + ".csv" : name + "-v" + std::to_string(k + 1) + ".csv");
      batch.push_back(std::async(std::launch::async, run_variant, base, list[k], csv, c.svg));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }

  std::ostringstream table;
  table << "variant,status,violations,max_u_norm,csv,overrides,message\n";
  int code = kPass;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const VariantResult& r = results[k];
    table << k + 1 << ',' << r.status << ',' << r.violations << ',' << ppfc::format_double(r.max_u) << ','
          << r.csv << ",\"" << r.label << "\",\"" << r.message << "\"\n";
    if (code == kPass && r.code != kPass) code = r.code;
  }
  std::ofstream(dir / "summary.csv", std::ios::binary) << table.str();
  std::cout << table.str();
  return code;
}

int cmd_list() {
  std::cout << "scenarios:\n";
  for (const auto& n : ppfc::builtin_scenario_names()) std::cout << "  " << n << '\n';
  std::cout << "checks:\n";
  for (const auto& n : ppfc::builtin_check_names()) std::cout << "  " << n << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prescribed-performance fault-tolerant backstepping: simulation and checks"};
  app.require_subcommand(1);

  Common run_opts, check_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "simulate one scenario");
  add_common(run, run_opts, "scenario");
  auto* check = app.add_subcommand("check", "controllability check of an auxiliary matrix candidate");
  add_common(check, check_opts, "check");
  auto* sweep = app.add_subcommand("sweep", "run scenario variants");
  add_common(sweep, sweep_opts, "scenario");
  std::vector<std::string> variants;
  unsigned jobs = 0;
  sweep->add_option("--variant,-V", variants, "overrides for one variant: \"key=json;key=json\" (repeatable)");
  sweep->add_option("--jobs,-j", jobs, "concurrent variants (0 = hardware threads)");
  auto* list = app.add_subcommand("list-builtins", "list builtin scenarios and checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInvalid;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*check) return cmd_check(check_opts);
    if (*sweep) return cmd_sweep(sweep_opts, variants, jobs);
    if (*list) return cmd_list();
  } catch (const ppfc::ValidationError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kInvalid;
  } catch (const ppfc::DomainError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ppfc::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
