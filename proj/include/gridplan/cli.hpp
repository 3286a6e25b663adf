#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/config.hpp"
#include "gridplan/errors.hpp"
#include "gridplan/grid_io.hpp"
#include "gridplan/harness.hpp"
#include "gridplan/record_io.hpp"

namespace gridplan {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int data = 2;
}  // namespace exit_code

namespace detail {

inline const char* level_name(int lvl) {
  switch (lvl) {
    case level::connection:
      return "connection";
    case level::convergence:
      return "convergence";
    case level::line_loading:
      return "line-loading";
    case level::voltage:
      return "voltage";
    case level::investment:
      return "investment";
  }
  return "?";
}

inline std::string format_money(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

/// Flags shared by the subcommands that build one problem.
struct ProblemFlags {
  std::string config;
  std::string grid;
  std::string cases;
  std::optional<double> switch_cost;
  bool additional_lines = false;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "run configuration file (gridplan-run)");
    app.add_option("--grid", grid, "grid file, overrides the config problem");
    app.add_option("--cases", cases, "load case file");
    app.add_option("--switch-cost", switch_cost, "investment charged per toggled switch");
    app.add_flag("--additional-lines", additional_lines, "add new-line measures from the bus triangulation");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
    if (!grid.empty()) {
      cfg.problem.grid = grid;
      cfg.problem.name.clear();
      if (cases.empty()) cfg.problem.load_cases.reset();
    }
    if (!cases.empty()) cfg.problem.load_cases = std::filesystem::path(cases);
    if (switch_cost) cfg.problem.catalog.switch_cost = *switch_cost;
    if (additional_lines) cfg.problem.catalog.additional_lines = true;
    return cfg;
  }
};

inline void require_grid(const RunConfig& cfg) {
  if (cfg.problem.grid.empty()) throw UsageError("no grid given; pass --grid or a --config with a problem");
}

inline void print_measure(std::ostream& out, const Problem& p, std::size_t i) {
  const Measure& m = p.catalog()[i];
  out << "  [" << i << "] " << to_string(m.kind);
  if (m.kind == MeasureKind::additional_line)
    out << " bus " << m.line.from_bus << "-" << m.line.to_bus << " " << format_money(m.line.length_km) << " km";
  else if (m.kind == MeasureKind::repl)
    out << " branch " << m.element;
  else
    out << " switch " << m.element;
  out << " cost " << format_money(m.invest_cost) << "\n";
}

inline void print_counts(std::ostream& out, const MeasureCatalog& c) {
  out << "REPL " << c.count(MeasureKind::repl) << "\n"
      << "SWITCH " << c.count(MeasureKind::toggle_switch) << "\n"
      << "AL " << c.count(MeasureKind::additional_line) << "\n"
      << "total " << c.size() << "\n";
}

inline int cmd_plan(ProblemFlags& pf, const std::string& algo, std::optional<std::uint64_t> seed,
                    std::optional<double> time_limit, std::optional<std::size_t> eval_limit,
                    std::optional<std::size_t> pf_limit, const std::string& out_path, bool print_config,
                    std::ostream& out) {
  RunConfig cfg = pf.resolve();
  if (!algo.empty()) {
    try {
      cfg.algorithm = parse_algorithm(algo);
    } catch (const ConfigurationError& e) {
      throw UsageError(e.what());
    }
  }
  if (seed) cfg.seed = *seed;
  if (time_limit) cfg.budget.time_limit_s = *time_limit;
  if (eval_limit) cfg.budget.eval_limit = *eval_limit;
  if (pf_limit) cfg.budget.powerflow_limit = *pf_limit;
  if (print_config) {
    out << to_json(cfg).dump(2) << "\n";
    return exit_code::ok;
  }
  require_grid(cfg);
  try {
    cfg.budget.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  Problem problem = load_problem(cfg.problem, cfg.evaluation);
  RunRecord rec = run_heuristic(cfg.algorithm, problem, cfg.budget, cfg.seed, cfg.params);
  const bool timing = cfg.budget.time_limit_s.has_value();
  if (out_path.empty()) {
    out << record_to_json(rec, timing).dump(1) << "\n";
    return exit_code::ok;
  }
  save_record(rec, out_path, timing);
  out << problem.name() << " " << rec.algorithm << " seed " << rec.seed << ": " << rec.total_evals << " evaluations";
  if (rec.best)
    out << ", best level " << rec.best->level << " (" << level_name(rec.best->level) << ") raw cost "
        << rec.best->raw_cost << " investment " << format_money(rec.best->investment);
  out << "\nrecord written to " << out_path << "\n";
  return exit_code::ok;
}

inline int cmd_benchmark(const std::string& config, const std::string& out_dir, std::optional<std::size_t> workers,
                         std::optional<std::size_t> stop_after, bool print_config, bool quiet, std::ostream& out,
                         std::ostream& err) {
  BenchmarkConfig cfg = load_benchmark_config(config);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (workers) cfg.workers = *workers;
  if (print_config) {
    out << to_json(cfg).dump(2) << "\n";
    return exit_code::ok;
  }
  BenchmarkOptions opts;
  opts.max_new_runs = stop_after;
  if (!quiet) opts.log = &err;
  auto outcome = run_benchmark(cfg, opts);
  out << "runs executed " << outcome.executed << ", resumed " << outcome.resumed << ", failed " << outcome.failed
      << "\n";
  if (outcome.complete)
    out << "reports written to " << (cfg.output_dir / "reports").string() << "\n";
  else
    out << "stopped early; run again with the same config to resume\n";
  return exit_code::ok;
}

inline int cmd_oracle(ProblemFlags& pf, std::size_t max_bits, std::ostream& out) {
  RunConfig cfg = pf.resolve();
  require_grid(cfg);
  Problem problem = load_problem(cfg.problem, cfg.evaluation);
  auto best = brute_force_oracle(problem, max_bits);
  const auto& r = best.result;
  out << "problem " << problem.name() << "\n"
      << "measures " << problem.catalog().size() << "\n"
      << "evaluations " << best.evaluations << "\n"
      << "optimum " << best.candidate.to_string() << "\n"
      << "level " << r.level << " (" << level_name(r.level) << ")\n"
      << "raw_cost " << r.raw_cost << "\n"
      << "investment " << format_money(r.investment) << "\n"
      << "selected\n";
  for (std::size_t i = 0; i < best.candidate.size(); ++i)
    if (best.candidate.test(i)) print_measure(out, problem, i);
  return exit_code::ok;
}

inline int cmd_validate(const std::string& grid_path, const std::string& cases_path, std::ostream& out) {
  Grid grid = load_grid(grid_path);
  out << grid_path << ": ok, " << grid.buses().size() << " buses, " << grid.branches().size() << " branches, "
      << grid.switches().size() << " switches, " << grid.injections().size() << " injections\n";
  if (!cases_path.empty()) {
    auto cases = load_load_cases(cases_path);
    // building the problem resolves every key the cases reference
    Problem problem(problem_name(ProblemSpec{.grid = grid_path}), std::move(grid), std::move(cases), CatalogConfig{});
    out << cases_path << ": ok, " << problem.load_cases().size() << " load cases\n";
  }
  return exit_code::ok;
}

inline int cmd_catalog(ProblemFlags& pf, bool list, std::ostream& out) {
  RunConfig cfg = pf.resolve();
  require_grid(cfg);
  Problem problem = load_problem(cfg.problem, cfg.evaluation);
  print_counts(out, problem.catalog());
  if (list)
    for (std::size_t i = 0; i < problem.catalog().size(); ++i) print_measure(out, problem, i);
  return exit_code::ok;
}

}  // namespace detail

/// Command-line entry point. `args` excludes the program name.
///
/// Exit status: 0 success, 1 usage or configuration error, 2 data error
/// (unreadable, malformed or invalid input files, infeasible problems,
/// refused enumerations).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grid planning with restriction-level heuristics", "gridplan"};
  app.require_subcommand(1);
  app.fallthrough(false);

  detail::ProblemFlags plan_flags, oracle_flags, catalog_flags;
  std::string algo, plan_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit;
  std::optional<std::size_t> eval_limit, pf_limit;
  bool plan_print = false;
  auto* plan = app.add_subcommand("plan", "run one algorithm on one problem and write its run record");
  plan_flags.add_to(*plan);
  plan->add_option("--algo", algo, "hc, ils, ga, pso, gwo or fwa");
  plan->add_option("--seed", seed, "random seed");
  plan->add_option("--time-limit", time_limit, "wall-clock budget in seconds");
  plan->add_option("--eval-limit", eval_limit, "budget in candidate evaluations");
  plan->add_option("--powerflow-limit", pf_limit, "budget in evaluations that reached the power flow");
  plan->add_option("--out", plan_out, "record file; printed to stdout when omitted");
  plan->add_flag("--print-config", plan_print, "print the effective configuration and exit");

  std::string bench_config, bench_out;
  std::optional<std::size_t> workers, stop_after;
  bool bench_print = false, quiet = false;
  auto* bench = app.add_subcommand("benchmark", "run a benchmark configuration and write reports");
  bench->add_option("--config", bench_config, "benchmark configuration file (gridplan-benchmark)")->required();
  bench->add_option("--out", bench_out, "output directory, overrides output_dir");
  bench->add_option("--workers", workers, "worker threads, overrides config and GRIDPLAN_WORKERS");
  bench->add_option("--stop-after", stop_after, "execute at most this many new runs, then stop");
  bench->add_flag("--print-config", bench_print, "print the effective configuration and exit");
  bench->add_flag("--quiet", quiet, "no per-run progress on stderr");

  std::size_t max_bits = 20;
  auto* oracle = app.add_subcommand("oracle", "enumerate every candidate and print the optimum");
  oracle_flags.add_to(*oracle);
  oracle->add_option("--max-bits", max_bits, "refuse catalogs with more measures")->capture_default_str();

  std::string validate_grid_path, validate_cases;
  auto* validate = app.add_subcommand("validate", "check a grid file and optionally a load case file");
  validate->add_option("--grid", validate_grid_path, "grid file")->required();
  validate->add_option("--cases", validate_cases, "load case file");

  bool list = false;
  auto* catalog = app.add_subcommand("catalog", "print the measure catalog counts per kind");
  catalog_flags.add_to(*catalog);
  catalog->add_flag("--list", list, "list every measure");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return exit_code::ok;
    CLI::App* shown = &app;
    for (auto* sub : app.get_subcommands({})) if (sub->parsed()) shown = sub;
    err << shown->help();
    return exit_code::usage;
  }

  try {
    if (plan->parsed())
      return detail::cmd_plan(plan_flags, algo, seed, time_limit, eval_limit, pf_limit, plan_out, plan_print, out);
    if (bench->parsed())
      return detail::cmd_benchmark(bench_config, bench_out, workers, stop_after, bench_print, quiet, out, err);
    if (oracle->parsed()) return detail::cmd_oracle(oracle_flags, max_bits, out);
    if (validate->parsed()) return detail::cmd_validate(validate_grid_path, validate_cases, out);
    if (catalog->parsed()) return detail::cmd_catalog(catalog_flags, list, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::data;
  }
  return exit_code::usage;
}

}  // namespace gridplan
