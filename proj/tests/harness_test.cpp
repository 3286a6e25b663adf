#include <gtest/gtest.h>

#include "support.hpp"

using namespace gridplan;
using support::TempDir;

namespace {

RunRecord record(const std::string& problem, const std::string& algo, std::optional<std::pair<int, double>> best,
                 std::vector<std::pair<std::size_t, double>> trajectory = {}) {
  RunRecord r;
  r.problem = problem;
  r.algorithm = algo;
  r.best_candidate = Candidate(2);
  if (best) {
    EvaluationResult e;
    e.level = best->first;
    e.raw_cost = best->second;
    e.normalized = normalized_cost(e.level, e.raw_cost);
    e.eval_class = e.level == 0 ? EvalClass::cost : EvalClass::powerflow;
    r.best = e;
  }
  for (auto [evals, cost] : trajectory) r.trajectory.push_back({0.0, evals, 0, cost, std::tanh(cost), "h"});
  if (!trajectory.empty()) r.total_evals = trajectory.back().first;
  r.by_class = {ClassCounter{3, 0.0}, ClassCounter{5, 0.0}, ClassCounter{2, 0.0}};
  return r;
}

BenchmarkConfig small_benchmark(const std::filesystem::path& out) {
  BenchmarkConfig cfg;
  cfg.problems = {support::desk14_spec()};
  cfg.algorithms = {Algorithm::ils, Algorithm::ga};
  cfg.runs_per_cell = 3;
  cfg.budget.eval_limit = 300;
  cfg.output_dir = out;
  cfg.checkpoints = {50, 150, 300};
  cfg.checkpoint_axis = CheckpointAxis::evals;
  cfg.workers = 2;
  return cfg;
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).generic_string()] = support::slurp(e.path());
  return files;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Oracle, EmptyCatalogEvaluatesTheBaseGrid) {
  Grid g = load_grid(support::data_path("desk14.grid.json"));
  Problem p("empty", g, load_load_cases(support::data_path("desk14.cases.json")), MeasureCatalog{});
  auto o = brute_force_oracle(p);
  EXPECT_EQ(o.evaluations, 1u);
  EXPECT_EQ(o.candidate.size(), 0u);
  auto base = p.evaluator().evaluate(Candidate(0));
  EXPECT_EQ(o.result.level, base.level);
  EXPECT_EQ(o.result.raw_cost, base.raw_cost);
}

TEST(Oracle, TwoMeasuresTakeFourEvaluations) {
  Grid g = load_grid(support::data_path("desk14.grid.json"));
  CatalogConfig cfg;
  auto full = build_catalog(g, cfg);
  MeasureCatalog two({full[0], full[1]});
  Problem p("two", g, {}, two);
  EXPECT_EQ(brute_force_oracle(p).evaluations, 4u);
}

TEST(Oracle, MatchesAShuffledEnumeration) {
  Problem p = load_problem(support::desk14_spec());
  const std::size_t m = p.catalog().size();
  ASSERT_EQ(m, 12u);
  auto o = brute_force_oracle(p);
  EXPECT_EQ(o.evaluations, 4096u);

  Rng rng(77);
  std::optional<EvaluationResult> best;
  std::uint64_t best_value = 0;
  for (auto v : rng.permutation(std::size_t{1} << m)) {
    auto r = p.evaluator().evaluate(Candidate::from_integer(v, m));
    const auto order = best ? compare_lex(r, *best) : std::weak_ordering::less;
    if (order < 0 || (order == 0 && v < best_value)) {
      best = r;
      best_value = v;
    }
  }
  EXPECT_EQ(o.candidate.to_integer(), best_value);
  EXPECT_EQ(o.result.level, best->level);
  EXPECT_EQ(o.result.raw_cost, best->raw_cost);
}

TEST(Oracle, RefusesLargeCatalogs) {
  Problem p = load_problem(support::desk14_spec());
  try {
    brute_force_oracle(p, 10);
    FAIL() << "expected refusal";
  } catch (const RefusalError& e) {
    EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
  }
}

TEST(Seeds, ScheduleSeparatesCellsAndRuns) {
  EXPECT_EQ(run_seed(1, 0, 0), 1'000'000u);
  EXPECT_EQ(run_seed(2, 3, 49), 2'003'049u);
  std::set<std::uint64_t> seen;
  for (std::size_t c = 0; c < 48; ++c)
    for (std::size_t r = 0; r < 50; ++r) seen.insert(run_seed(7, c, r));
  EXPECT_EQ(seen.size(), 48u * 50u);
}

TEST(Summary, NormalizesAgainstTheGlobalBest) {
  std::vector<RunRecord> recs{record("g", "a", std::pair{0, 4.0}), record("g", "a", std::pair{0, 6.0}),
                              record("g", "b", std::pair{0, 25.0}), record("g", "b", std::pair{2, 0.3}),
                              record("g", "b", std::nullopt)};
  auto t = summarize(recs, {}, CheckpointAxis::evals);
  ASSERT_TRUE(t.global_best.at("g"));
  EXPECT_DOUBLE_EQ(*t.global_best.at("g"), 4.0);
  ASSERT_EQ(t.runs.size(), 5u);
  EXPECT_DOUBLE_EQ(*t.runs[0].normalized, 1.0);
  EXPECT_DOUBLE_EQ(*t.runs[1].normalized, 1.5);
  EXPECT_FALSE(t.runs[1].clipped);
  EXPECT_DOUBLE_EQ(*t.runs[2].ratio, 6.25);
  EXPECT_DOUBLE_EQ(*t.runs[2].normalized, 5.0);
  EXPECT_TRUE(t.runs[2].clipped);
  EXPECT_FALSE(t.runs[3].normalized);
  EXPECT_FALSE(t.runs[4].normalized);
  EXPECT_EQ(t.runs[0].run, 0u);
  EXPECT_EQ(t.runs[1].run, 1u);
  EXPECT_EQ(t.runs[2].run, 0u);
}

TEST(Summary, GridWithoutFeasibleRunIsMarkedInfeasible) {
  std::vector<RunRecord> recs{record("hard", "a", std::pair{3, 1.0})};
  auto t = summarize(recs, {}, CheckpointAxis::evals);
  EXPECT_FALSE(t.global_best.at("hard"));
  TempDir dir("infeasible");
  emit_reports(t, recs, dir.path());
  auto text = support::slurp(dir / "normalized_costs.csv");
  EXPECT_NE(text.find("infeasible"), std::string::npos);
}

TEST(Summary, SharesSumToOne) {
  std::vector<RunRecord> recs{record("g", "a", std::pair{0, 1.0})};
  recs.push_back(record("g", "a", std::pair{0, 2.0}));
  recs[1].by_class = {ClassCounter{1, 0.5}, ClassCounter{2, 1.0}, ClassCounter{1, 0.25}};
  auto t = summarize(recs, {}, CheckpointAxis::time);
  EXPECT_EQ(t.runs[0].share_basis, "evals");
  EXPECT_EQ(t.runs[1].share_basis, "time");
  for (const auto& r : t.runs) {
    ASSERT_TRUE(r.class_shares);
    EXPECT_NEAR((*r.class_shares)[0] + (*r.class_shares)[1] + (*r.class_shares)[2], 1.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ((*t.runs[0].class_shares)[1], 0.5);
  EXPECT_NEAR((*t.runs[1].class_shares)[0], 0.5 / 1.75, 1e-15);
}

TEST(Summary, CheckpointCountsAreMonotone) {
  std::vector<RunRecord> recs{
      record("g", "a", std::pair{0, 4.0}, {{10, 9.0}, {40, 4.0}}),
      record("g", "a", std::pair{0, 5.0}, {{5, 5.0}}),
      record("g", "b", std::pair{0, 4.0}, {{100, 4.0}}),
      record("h", "a", std::pair{0, 1.0}, {{30, 1.0}}),
      record("h", "b", std::pair{0, 2.0}, {{1, 2.0}}),
  };
  auto t = summarize(recs, {20, 50, 200}, CheckpointAxis::evals);
  std::map<std::pair<std::string, double>, CheckpointCount> by;
  for (const auto& c : t.checkpoints) by[{c.algorithm, c.checkpoint}] = c;
  auto at = [&](std::string a, double cp) { return by.at({a, cp}); };
  EXPECT_EQ(at("a", 20).runs_at_best, 0u);
  EXPECT_EQ(at("a", 50).runs_at_best, 2u);
  EXPECT_EQ(at("a", 50).grids_at_best, 2u);
  EXPECT_EQ(at("b", 50).runs_at_best, 0u);
  EXPECT_EQ(at("b", 200).runs_at_best, 1u);
  EXPECT_EQ(at("a", 200).runs, 3u);
  EXPECT_EQ(at("a", 200).grids, 2u);
  for (const auto& alg : {"a", "b"}) {
    EXPECT_LE(at(alg, 20).runs_at_best, at(alg, 50).runs_at_best);
    EXPECT_LE(at(alg, 50).runs_at_best, at(alg, 200).runs_at_best);
  }
  EXPECT_EQ(*t.runs[0].evals_to_best, 40u);
}

TEST(Reports, EmptyRecordSetGivesHeadersOnly) {
  TempDir dir("empty");
  emit_reports(summarize({}, {1.0}, CheckpointAxis::evals), {}, dir.path());
  for (const char* f : {"normalized_costs.csv", "checkpoint_best_counts.csv", "eval_class_shares.csv"}) {
    auto text = support::slurp(dir / f);
    EXPECT_EQ(line_count(text), 1u) << f;
  }
  EXPECT_TRUE(!std::filesystem::exists(dir / "trajectories") || std::filesystem::is_empty(dir / "trajectories"));
}

TEST(Reports, NumbersUseShortestRoundTripForm) {
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(6.25), "6.25");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Reports, CsvQuotesSpecialCells) {
  CsvWriter w({"a", "b"});
  w.row({"x,y", "say \"hi\""});
  EXPECT_EQ(w.text(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(Records, RoundTripThroughJson) {
  auto r = run_heuristic(Algorithm::ga, load_problem(support::desk14_spec()), Budget{{}, 200, {}}, 5);
  for (bool timing : {false, true}) {
    auto back = record_from_json(record_to_json(r, timing));
    EXPECT_EQ(record_to_json(back, timing).dump(), record_to_json(r, timing).dump());
  }
  EXPECT_FALSE(record_to_json(r, false).contains("elapsed_s"));
  EXPECT_TRUE(record_to_json(r, true).contains("elapsed_s"));
}

TEST(Benchmark, TwoCellsGiveTwoTrajectoryFiles) {
  TempDir dir("bench2");
  auto outcome = run_benchmark(small_benchmark(dir.path()));
  EXPECT_EQ(outcome.records.size(), 6u);
  EXPECT_EQ(outcome.executed, 6u);
  EXPECT_TRUE(outcome.complete);
  std::size_t traj = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "reports/trajectories")) {
    (void)e;
    ++traj;
  }
  EXPECT_EQ(traj, 2u);
  for (const char* f : {"normalized_costs.csv", "checkpoint_best_counts.csv", "eval_class_shares.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string("reports/") + f)));
  EXPECT_EQ(line_count(support::slurp(dir / "reports/normalized_costs.csv")), 7u);
  // seeds follow the schedule: cell 1 is (desk14, ga)
  EXPECT_EQ(outcome.records[4].seed, run_seed(1, 1, 1));
}

TEST(Benchmark, RerunExecutesNothingAndReemitsIdenticalReports) {
  TempDir dir("bench-idem");
  auto cfg = small_benchmark(dir.path());
  run_benchmark(cfg);
  auto first = snapshot(dir.path());
  auto again = run_benchmark(cfg);
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.resumed, 6u);
  EXPECT_EQ(snapshot(dir.path()), first);
}

TEST(Benchmark, ResumeAfterInterruptionIsByteIdentical) {
  TempDir a("bench-full"), b("bench-resume");
  run_benchmark(small_benchmark(a.path()));
  auto cfg = small_benchmark(b.path());
  BenchmarkOptions stop;
  stop.max_new_runs = 2;
  auto partial = run_benchmark(cfg, stop);
  EXPECT_FALSE(partial.complete);
  EXPECT_FALSE(std::filesystem::exists(b / "reports"));
  stop.max_new_runs = 1;
  run_benchmark(cfg, stop);
  auto rest = run_benchmark(cfg);
  EXPECT_EQ(rest.executed, 3u);
  EXPECT_EQ(snapshot(a.path()), snapshot(b.path()));
}

TEST(Benchmark, UnloadableGridFailsBeforeAnyRun) {
  TempDir dir("bench-bad");
  write_text_file(dir / "bad.grid.json", "{\"format\": \"gridplan-grid\"");
  auto cfg = small_benchmark(dir / "out");
  ProblemSpec bad;
  bad.grid = dir / "bad.grid.json";
  cfg.problems.push_back(bad);
  EXPECT_THROW(run_benchmark(cfg), ParseError);
  EXPECT_FALSE(std::filesystem::exists(dir / "out/runs"));
}

TEST(Benchmark, InitializationFailureIsRecorded) {
  TempDir dir("bench-init");
  Grid g(100.0, {support::bus(1), support::bus(2), support::bus(3)}, {support::line(1, 1, 2, 0.4, 0.8)},
         {support::gate(1, 2, 1, true)}, {support::slack(1, 1), support::load(2, 3, 1.0, 0.0)});
  save_grid(g, dir / "island.grid.json");
  BenchmarkConfig cfg;
  ProblemSpec spec;
  spec.grid = dir / "island.grid.json";
  cfg.problems = {spec};
  cfg.algorithms = {Algorithm::ga, Algorithm::hc};
  cfg.runs_per_cell = 2;
  cfg.budget.eval_limit = 20;
  cfg.output_dir = dir / "out";
  cfg.checkpoints = {10};
  cfg.checkpoint_axis = CheckpointAxis::evals;
  auto outcome = run_benchmark(cfg);
  EXPECT_EQ(outcome.failed, 2u);
  EXPECT_EQ(outcome.records[0].status, "failed");
  EXPECT_EQ(outcome.records[2].status, "ok");
  EXPECT_TRUE(outcome.complete);
}

TEST(Benchmark, ConfigurationIsValidated) {
  TempDir dir("bench-cfg");
  auto cfg = small_benchmark(dir.path());
  cfg.runs_per_cell = 0;
  EXPECT_THROW(run_benchmark(cfg), ConfigurationError);
  cfg = small_benchmark(dir.path());
  cfg.algorithms.clear();
  EXPECT_THROW(run_benchmark(cfg), ConfigurationError);
  cfg = small_benchmark(dir.path());
  cfg.problems[0].grid = dir / "missing.grid.json";
  EXPECT_THROW(run_benchmark(cfg), IoError);
  cfg = small_benchmark(dir.path());
  cfg.problems.push_back(cfg.problems[0]);
  EXPECT_THROW(run_benchmark(cfg), ConfigurationError);
}
