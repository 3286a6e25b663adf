#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "gridplan/config.hpp"
#include "gridplan/errors.hpp"
#include "gridplan/heuristics/run.hpp"
#include "gridplan/problem.hpp"
#include "gridplan/record_io.hpp"
#include "gridplan/reports.hpp"

namespace gridplan {

struct OracleResult {
  Candidate candidate;
  EvaluationResult result;
  std::uint64_t evaluations = 0;
};

/// Exhaustive search over all 2^M candidates of `problem`.
///
/// Returns the lexicographic minimum; among equal results the candidate with
/// the lowest integer value wins. Refuses catalogs larger than `max_bits`.
inline OracleResult brute_force_oracle(const Problem& problem, std::size_t max_bits = 20) {
  const std::size_t m = problem.catalog().size();
  if (max_bits > 63) max_bits = 63;
  if (m > max_bits)
    throw RefusalError("catalog has " + std::to_string(m) + " measures, exhaustive search is capped at " +
                       std::to_string(max_bits));
  const std::uint64_t total = std::uint64_t{1} << m;
  OracleResult best{Candidate(m), problem.evaluator().evaluate(Candidate(m)), 1};
  for (std::uint64_t v = 1; v < total; ++v) {
    Candidate c = Candidate::from_integer(v, m);
    EvaluationResult r = problem.evaluator().evaluate(c);
    ++best.evaluations;
    if (better_lex(r, best.result)) {
      best.candidate = std::move(c);
      best.result = std::move(r);
    }
  }
  return best;
}

/// Seed of run `run` in cell `cell`: base * 10^6 + cell * 10^3 + run.
inline std::uint64_t run_seed(std::uint64_t seed_base, std::size_t cell, std::size_t run) {
  return seed_base * 1'000'000ULL + static_cast<std::uint64_t>(cell) * 1'000ULL + run;
}

inline std::filesystem::path run_record_path(const std::filesystem::path& out_dir, const std::string& problem,
                                             Algorithm algo, std::size_t run) {
  char name[32];
  std::snprintf(name, sizeof name, "run-%04zu.json", run);
  return out_dir / "runs" / problem / to_string(algo) / name;
}

struct BenchmarkOptions {
  /// Stop after this many newly executed runs; used to emulate interruption.
  std::optional<std::size_t> max_new_runs;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct BenchmarkOutcome {
  std::vector<RunRecord> records;  // problem-major, then algorithm, then run
  std::size_t executed = 0;
  std::size_t resumed = 0;
  std::size_t failed = 0;
  bool complete = true;
};

/// Runs every (problem, algorithm, run) cell that has no persisted record yet,
/// writing one record file per run, then rebuilds the reports from the files
/// on disk. Grids are loaded before anything runs; an unloadable grid aborts
/// the benchmark. Initialization failures of single runs are persisted as
/// failed records.
inline BenchmarkOutcome run_benchmark(const BenchmarkConfig& cfg, const BenchmarkOptions& options = {}) {
  cfg.validate();
  if (cfg.runs_per_cell > 1000) throw ConfigurationError("runs_per_cell must not exceed 1000 (seed schedule)");
  const std::size_t cells = cfg.problems.size() * cfg.algorithms.size();
  if (cells > 1000) throw ConfigurationError("at most 1000 cells are supported (seed schedule)");

  std::vector<std::unique_ptr<Problem>> problems;
  std::set<std::string> names;
  for (const auto& spec : cfg.problems) {
    problems.push_back(std::make_unique<Problem>(load_problem(spec, cfg.evaluation)));
    if (!names.insert(problems.back()->name()).second)
      throw ConfigurationError("duplicate problem name '" + problems.back()->name() + "'");
  }
  const bool timing = cfg.budget.time_limit_s.has_value();

  struct Task {
    std::size_t problem, algorithm, run;
    std::uint64_t seed;
    std::filesystem::path file;
  };
  std::vector<Task> tasks;
  std::vector<std::filesystem::path> files;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
      for (std::size_t r = 0; r < cfg.runs_per_cell; ++r) {
        const std::size_t cell = p * cfg.algorithms.size() + a;
        auto file = run_record_path(cfg.output_dir, problems[p]->name(), cfg.algorithms[a], r);
        files.push_back(file);
        if (!std::filesystem::exists(file)) tasks.push_back({p, a, r, run_seed(cfg.seed_base, cell, r), file});
      }

  BenchmarkOutcome outcome;
  outcome.resumed = files.size() - tasks.size();
  if (options.max_new_runs && *options.max_new_runs < tasks.size()) {
    tasks.resize(*options.max_new_runs);
    outcome.complete = false;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::mutex log_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      const Problem& problem = *problems[t.problem];
      const Algorithm algo = cfg.algorithms[t.algorithm];
      try {
        RunRecord rec;
        try {
          rec = run_heuristic(algo, problem, cfg.budget, t.seed, cfg.params);
        } catch (const InitializationError& e) {
          rec = RunRecord{};
          rec.algorithm = to_string(algo);
          rec.problem = problem.name();
          rec.seed = t.seed;
          rec.status = "failed";
          rec.error = e.what();
          rec.best_candidate = Candidate(problem.catalog().size());
          failed.fetch_add(1);
        }
        save_record(rec, t.file, timing);
        if (options.log) {
          std::lock_guard lock(log_mutex);
          *options.log << problem.name() << " " << to_string(algo) << " run " << t.run << " seed " << t.seed << " "
                       << rec.status << "\n";
        }
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!error) error = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };
  const std::size_t n_workers = std::min(resolve_workers(cfg.workers), std::max<std::size_t>(tasks.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  outcome.executed = tasks.size();
  outcome.failed = failed.load();

  for (const auto& f : files)
    if (std::filesystem::exists(f)) outcome.records.push_back(load_record(f));
  if (outcome.complete) {
    auto tables = summarize(outcome.records, cfg.checkpoints, cfg.checkpoint_axis);
    emit_reports(tables, outcome.records, cfg.output_dir / "reports");
  }
  return outcome;
}

}  // namespace gridplan
