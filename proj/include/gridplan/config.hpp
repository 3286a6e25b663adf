#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid_io.hpp"
#include "gridplan/heuristics/run.hpp"
#include "gridplan/json_reader.hpp"
#include "gridplan/problem.hpp"
#include "gridplan/reports.hpp"

namespace gridplan {

inline constexpr const char* run_config_format = "gridplan-run";
inline constexpr const char* benchmark_config_format = "gridplan-benchmark";

/// Where a problem comes from. Paths are absolute or relative to the working
/// directory once the owning config file has been read.
struct ProblemSpec {
  std::string name;  // empty means the grid file stem
  std::filesystem::path grid;
  std::optional<std::filesystem::path> load_cases;
  CatalogConfig catalog;
  LimitOverrides limits;
};

struct RunConfig {
  ProblemSpec problem;
  Algorithm algorithm = Algorithm::ils;
  HeuristicParams params;
  Budget budget;
  std::uint64_t seed = 1;
  EvaluationOptions evaluation;
};

struct BenchmarkConfig {
  std::vector<ProblemSpec> problems;
  std::vector<Algorithm> algorithms;
  HeuristicParams params;
  std::size_t runs_per_cell = 50;
  Budget budget;
  std::uint64_t seed_base = 1;
  std::filesystem::path output_dir = "benchmark-out";
  std::vector<double> checkpoints{300.0, 1800.0, 3600.0};
  CheckpointAxis checkpoint_axis = CheckpointAxis::time;
  std::size_t workers = 0;  // 0: GRIDPLAN_WORKERS, else hardware concurrency
  EvaluationOptions evaluation;

  void validate() const {
    if (problems.empty()) throw ConfigurationError("benchmark needs at least one problem");
    if (algorithms.empty()) throw ConfigurationError("benchmark needs at least one algorithm");
    if (runs_per_cell == 0) throw ConfigurationError("runs_per_cell must be at least 1");
    budget.validate();
    for (const auto& p : problems) {
      if (!std::filesystem::exists(p.grid)) throw IoError("grid file not found: " + p.grid.string());
      if (p.load_cases && !std::filesystem::exists(*p.load_cases))
        throw IoError("load case file not found: " + p.load_cases->string());
    }
  }
};

/// Worker count: explicit value, then GRIDPLAN_WORKERS, then the number of cores.
inline std::size_t resolve_workers(std::size_t configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("GRIDPLAN_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw ConfigurationError(std::string("GRIDPLAN_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::string problem_name(const ProblemSpec& spec) {
  if (!spec.name.empty()) return spec.name;
  auto stem = spec.grid.filename().string();
  for (const char* suffix : {".grid.json", ".json"})
    if (stem.size() > std::string(suffix).size() && stem.ends_with(suffix))
      return stem.substr(0, stem.size() - std::string(suffix).size());
  return stem;
}

inline Problem load_problem(const ProblemSpec& spec, const EvaluationOptions& opts = {}) {
  Grid grid = load_grid(spec.grid);
  if (spec.limits.min_vm_pu || spec.limits.max_vm_pu || spec.limits.max_loading_percent) {
    grid = with_limits(grid, spec.limits);
    auto report = validate_grid(grid);
    if (!report.empty()) throw ValidationError("limit overrides make the grid invalid\n" + format_report(report));
  }
  std::vector<LoadCase> cases;
  if (spec.load_cases) cases = load_load_cases(*spec.load_cases);
  return Problem(problem_name(spec), std::move(grid), std::move(cases), spec.catalog, opts);
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline void read_template(ObjectReader& r, LineTemplate& t) {
  t.r_ohm_per_km = r.value("r_ohm_per_km", t.r_ohm_per_km);
  t.x_ohm_per_km = r.value("x_ohm_per_km", t.x_ohm_per_km);
  t.b_us_per_km = r.value("b_us_per_km", t.b_us_per_km);
  t.max_i_ka = r.value("max_i_ka", t.max_i_ka);
  t.max_loading_percent = r.value("max_loading_percent", t.max_loading_percent);
  t.cost_per_km = r.value("cost_per_km", t.cost_per_km);
}

inline void read_catalog(ObjectReader& r, CatalogConfig& c) {
  c.additional_lines = r.value("additional_lines", c.additional_lines);
  c.detour_factor = r.value("detour_factor", c.detour_factor);
  c.switch_cost = r.value("switch_cost", c.switch_cost);
  if (const Json* t = r.child("al_template")) {
    ObjectReader tr(*t, r.child_path("al_template"));
    read_template(tr, c.al_template);
    tr.finish();
  }
}

inline ProblemSpec read_problem(ObjectReader& r, const std::filesystem::path& base) {
  ProblemSpec p;
  p.name = r.value<std::string>("name", "");
  p.grid = resolve_path(base, r.required<std::string>("grid"));
  if (auto lc = r.optional<std::string>("load_cases")) p.load_cases = resolve_path(base, *lc);
  if (const Json* c = r.child("catalog")) {
    ObjectReader cr(*c, r.child_path("catalog"));
    read_catalog(cr, p.catalog);
    cr.finish();
  }
  if (const Json* l = r.child("limits")) {
    ObjectReader lr(*l, r.child_path("limits"));
    p.limits.min_vm_pu = lr.optional<double>("min_vm_pu");
    p.limits.max_vm_pu = lr.optional<double>("max_vm_pu");
    p.limits.max_loading_percent = lr.optional<double>("max_loading_percent");
    lr.finish();
  }
  return p;
}

inline void read_budget(ObjectReader& r, Budget& b) {
  b.time_limit_s = r.optional<double>("time_limit_s");
  b.eval_limit = r.optional<std::size_t>("eval_limit");
  b.powerflow_limit = r.optional<std::size_t>("powerflow_limit");
}

inline void read_evaluation(ObjectReader& r, EvaluationOptions& e) {
  e.cost_scale = r.value("cost_scale", e.cost_scale);
  if (const Json* pf = r.child("power_flow")) {
    ObjectReader pr(*pf, r.child_path("power_flow"));
    e.pf.tol_mva = pr.optional<double>("tol_mva");
    e.pf.max_iter = pr.value("max_iter", e.pf.max_iter);
    const auto init = pr.value<std::string>("init", "flat");
    if (init == "flat")
      e.pf.init = PfInit::flat;
    else if (init == "previous")
      e.pf.init = PfInit::previous;
    else
      throw ParseError(pr.path() + ".init: expected 'flat' or 'previous'");
    pr.finish();
  }
}

/// Reads the parameter block of one algorithm into `params`.
inline void read_params(ObjectReader& r, Algorithm a, HeuristicParams& params) {
  switch (a) {
    case Algorithm::hc:
      break;
    case Algorithm::ils:
      params.ils.perturbation = r.value("perturbation", params.ils.perturbation);
      params.ils.accept_equal = r.value("accept_equal", params.ils.accept_equal);
      break;
    case Algorithm::ga:
      params.ga.population = r.value("population", params.ga.population);
      params.ga.tournament = r.value("tournament", params.ga.tournament);
      params.ga.crossover_rate = r.value("crossover_rate", params.ga.crossover_rate);
      params.ga.crossover_bit = r.value("crossover_bit", params.ga.crossover_bit);
      params.ga.mutation_bit = r.value("mutation_bit", params.ga.mutation_bit);
      params.ga.elites = r.value("elites", params.ga.elites);
      break;
    case Algorithm::pso:
      params.pso.particles = r.value("particles", params.pso.particles);
      params.pso.inertia = r.value("inertia", params.pso.inertia);
      params.pso.cognitive = r.value("cognitive", params.pso.cognitive);
      params.pso.social = r.value("social", params.pso.social);
      params.pso.v_max = r.value("v_max", params.pso.v_max);
      params.pso.initial_velocity = r.value("initial_velocity", params.pso.initial_velocity);
      break;
    case Algorithm::gwo:
      params.gwo.wolves = r.value("wolves", params.gwo.wolves);
      params.gwo.a_start = r.value("a_start", params.gwo.a_start);
      params.gwo.a_end = r.value("a_end", params.gwo.a_end);
      params.gwo.steepness = r.value("steepness", params.gwo.steepness);
      break;
    case Algorithm::fwa:
      params.fwa.fireworks = r.value("fireworks", params.fwa.fireworks);
      params.fwa.total_sparks = r.value("total_sparks", params.fwa.total_sparks);
      params.fwa.min_sparks = r.value("min_sparks", params.fwa.min_sparks);
      params.fwa.max_sparks = r.value("max_sparks", params.fwa.max_sparks);
      params.fwa.max_amplitude = r.value("max_amplitude", params.fwa.max_amplitude);
      params.fwa.mutation_flips = r.value("mutation_flips", params.fwa.mutation_flips);
      break;
  }
}

inline Algorithm read_algorithm(ObjectReader& r, HeuristicParams& params) {
  Algorithm a = parse_algorithm(r.required<std::string>("id"));
  if (const Json* p = r.child("params")) {
    ObjectReader pr(*p, r.child_path("params"));
    read_params(pr, a, params);
    pr.finish();
  }
  return a;
}

}  // namespace detail

inline RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base, const std::string& origin) {
  ObjectReader root(doc, origin);
  expect_format(root, run_config_format, 1);
  RunConfig cfg;
  if (const Json* p = root.child("problem")) {
    ObjectReader pr(*p, root.child_path("problem"));
    cfg.problem = detail::read_problem(pr, base);
    pr.finish();
  }
  if (const Json* a = root.child("algorithm")) {
    ObjectReader ar(*a, root.child_path("algorithm"));
    cfg.algorithm = detail::read_algorithm(ar, cfg.params);
    ar.finish();
  }
  if (const Json* b = root.child("budget")) {
    ObjectReader br(*b, root.child_path("budget"));
    detail::read_budget(br, cfg.budget);
    br.finish();
  }
  cfg.seed = root.value<std::uint64_t>("seed", cfg.seed);
  detail::read_evaluation(root, cfg.evaluation);
  root.finish();
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(parse_json_text(read_text_file(path), path.string()), path.parent_path(),
                              path.string());
}

inline BenchmarkConfig benchmark_config_from_json(const Json& doc, const std::filesystem::path& base,
                                                  const std::string& origin) {
  ObjectReader root(doc, origin);
  expect_format(root, benchmark_config_format, 1);
  BenchmarkConfig cfg;
  detail::for_each_entry(root, "problems", [&](ObjectReader& r) { cfg.problems.push_back(detail::read_problem(r, base)); });
  detail::for_each_entry(root, "algorithms",
                         [&](ObjectReader& r) { cfg.algorithms.push_back(detail::read_algorithm(r, cfg.params)); });
  cfg.runs_per_cell = root.value("runs_per_cell", cfg.runs_per_cell);
  if (const Json* b = root.child("budget")) {
    ObjectReader br(*b, root.child_path("budget"));
    detail::read_budget(br, cfg.budget);
    br.finish();
  }
  cfg.seed_base = root.value("seed_base", cfg.seed_base);
  if (auto out = root.optional<std::string>("output_dir")) cfg.output_dir = detail::resolve_path(base, *out);
  cfg.checkpoints = root.value("checkpoints", cfg.checkpoints);
  const auto axis = root.value<std::string>("checkpoint_axis", "time");
  if (axis == "time")
    cfg.checkpoint_axis = CheckpointAxis::time;
  else if (axis == "evals")
    cfg.checkpoint_axis = CheckpointAxis::evals;
  else
    throw ParseError(origin + ".checkpoint_axis: expected 'time' or 'evals'");
  cfg.workers = root.value("workers", cfg.workers);
  detail::read_evaluation(root, cfg.evaluation);
  root.finish();
  return cfg;
}

inline BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
  return benchmark_config_from_json(parse_json_text(read_text_file(path), path.string()), path.parent_path(),
                                    path.string());
}

// ---------------------------------------------------------------------------
// Writing (every field, defaults included)

namespace detail {

inline Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
inline Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json catalog_json(const CatalogConfig& c) {
  const auto& t = c.al_template;
  return {{"additional_lines", c.additional_lines},
          {"detour_factor", c.detour_factor},
          {"switch_cost", c.switch_cost},
          {"al_template",
           {{"r_ohm_per_km", t.r_ohm_per_km},
            {"x_ohm_per_km", t.x_ohm_per_km},
            {"b_us_per_km", t.b_us_per_km},
            {"max_i_ka", t.max_i_ka},
            {"max_loading_percent", t.max_loading_percent},
            {"cost_per_km", t.cost_per_km}}}};
}

inline Json problem_json(const ProblemSpec& p) {
  return {{"name", p.name},
          {"grid", p.grid.generic_string()},
          {"load_cases", p.load_cases ? Json(p.load_cases->generic_string()) : Json(nullptr)},
          {"catalog", catalog_json(p.catalog)},
          {"limits",
           {{"min_vm_pu", optional_json(p.limits.min_vm_pu)},
            {"max_vm_pu", optional_json(p.limits.max_vm_pu)},
            {"max_loading_percent", optional_json(p.limits.max_loading_percent)}}}};
}

inline Json budget_json(const Budget& b) {
  return {{"time_limit_s", optional_json(b.time_limit_s)},
          {"eval_limit", optional_json(b.eval_limit)},
          {"powerflow_limit", optional_json(b.powerflow_limit)}};
}

inline Json params_json(Algorithm a, const HeuristicParams& p) {
  switch (a) {
    case Algorithm::hc:
      return Json::object();
    case Algorithm::ils:
      return {{"perturbation", p.ils.perturbation}, {"accept_equal", p.ils.accept_equal}};
    case Algorithm::ga:
      return {{"population", p.ga.population},         {"tournament", p.ga.tournament},
              {"crossover_rate", p.ga.crossover_rate}, {"crossover_bit", p.ga.crossover_bit},
              {"mutation_bit", p.ga.mutation_bit},     {"elites", p.ga.elites}};
    case Algorithm::pso:
      return {{"particles", p.pso.particles}, {"inertia", p.pso.inertia}, {"cognitive", p.pso.cognitive},
              {"social", p.pso.social},       {"v_max", p.pso.v_max},     {"initial_velocity", p.pso.initial_velocity}};
    case Algorithm::gwo:
      return {{"wolves", p.gwo.wolves}, {"a_start", p.gwo.a_start}, {"a_end", p.gwo.a_end}, {"steepness", p.gwo.steepness}};
    case Algorithm::fwa:
      return {{"fireworks", p.fwa.fireworks},         {"total_sparks", p.fwa.total_sparks},
              {"min_sparks", p.fwa.min_sparks},       {"max_sparks", p.fwa.max_sparks},
              {"max_amplitude", p.fwa.max_amplitude}, {"mutation_flips", p.fwa.mutation_flips}};
  }
  return Json::object();
}

inline void put_evaluation(Json& j, const EvaluationOptions& e) {
  j["cost_scale"] = e.cost_scale;
  j["power_flow"] = {{"tol_mva", optional_json(e.pf.tol_mva)},
                     {"max_iter", e.pf.max_iter},
                     {"init", e.pf.init == PfInit::flat ? "flat" : "previous"}};
}

}  // namespace detail

inline Json to_json(const RunConfig& cfg) {
  Json j{{"format", run_config_format},
         {"version", 1},
         {"problem", detail::problem_json(cfg.problem)},
         {"algorithm", {{"id", to_string(cfg.algorithm)}, {"params", detail::params_json(cfg.algorithm, cfg.params)}}},
         {"budget", detail::budget_json(cfg.budget)},
         {"seed", cfg.seed}};
  detail::put_evaluation(j, cfg.evaluation);
  return j;
}

inline Json to_json(const BenchmarkConfig& cfg) {
  Json problems = Json::array();
  for (const auto& p : cfg.problems) problems.push_back(detail::problem_json(p));
  Json algorithms = Json::array();
  for (auto a : cfg.algorithms) algorithms.push_back({{"id", to_string(a)}, {"params", detail::params_json(a, cfg.params)}});
  Json j{{"format", benchmark_config_format},
         {"version", 1},
         {"problems", problems},
         {"algorithms", algorithms},
         {"runs_per_cell", cfg.runs_per_cell},
         {"budget", detail::budget_json(cfg.budget)},
         {"seed_base", cfg.seed_base},
         {"output_dir", cfg.output_dir.generic_string()},
         {"checkpoints", cfg.checkpoints},
         {"checkpoint_axis", cfg.checkpoint_axis == CheckpointAxis::time ? "time" : "evals"},
         {"workers", cfg.workers}};
  detail::put_evaluation(j, cfg.evaluation);
  return j;
}

}  // namespace gridplan
