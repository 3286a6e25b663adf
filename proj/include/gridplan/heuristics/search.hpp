#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/evaluation.hpp"
#include "gridplan/measures.hpp"
#include "gridplan/problem.hpp"

namespace gridplan {

/// Termination limits. Any subset may be set, but at least one must be.
///
/// `powerflow_limit` caps the evaluations that reached the power flow
/// (classes powerflow and cost); topology-only evaluations do not count.
struct Budget {
  std::optional<double> time_limit_s;
  std::optional<std::size_t> eval_limit;
  std::optional<std::size_t> powerflow_limit;

  void validate() const {
    if (!time_limit_s && !eval_limit && !powerflow_limit)
      throw ConfigurationError("budget needs a time limit, an evaluation limit or a power-flow limit");
    if (time_limit_s && !(*time_limit_s >= 0.0)) throw DomainError("time limit must be non-negative");
  }

  bool zero() const {
    return (time_limit_s && *time_limit_s <= 0.0) || (eval_limit && *eval_limit == 0) ||
           (powerflow_limit && *powerflow_limit == 0);
  }
};

struct TrajectoryPoint {
  double elapsed_s = 0.0;
  std::size_t eval_count = 0;
  int level = 0;
  double raw_cost = 0.0;
  double normalized = 0.0;
  std::string candidate_hash;
};

struct ClassCounter {
  std::size_t count = 0;
  double seconds = 0.0;
};

/// Outcome of one seeded heuristic run.
struct RunRecord {
  std::string algorithm;
  std::string problem;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "failed"
  std::string error;
  std::vector<TrajectoryPoint> trajectory;
  Candidate best_candidate;
  std::optional<EvaluationResult> best;
  std::array<ClassCounter, 3> by_class{};  // indexed by EvalClass
  std::size_t total_evals = 0;
  double init_s = 0.0;
  double elapsed_s = 0.0;
  bool local_optimum = false;

  /// Marker for runs whose budget did not allow a single evaluation.
  bool no_evaluation() const { return total_evals == 0; }
  const ClassCounter& counter(EvalClass c) const { return by_class[static_cast<std::size_t>(c)]; }
};

/// Which ordering decides "better" inside a run.
enum class Comparator { lexicographic, normalized };

inline bool improves(Comparator cmp, const EvaluationResult& candidate, const EvaluationResult& incumbent) {
  return cmp == Comparator::lexicographic ? better_lex(candidate, incumbent)
                                          : candidate.normalized < incumbent.normalized;
}

/// Budget-aware evaluation front end shared by all heuristics.
///
/// Counts and times every evaluation per class, keeps the best-so-far and
/// appends a trajectory point on each strict improvement.
class Search {
 public:
  using Clock = std::chrono::steady_clock;

  Search(const Problem& problem, const Budget& budget, Comparator cmp, RunRecord& record)
      : problem_(problem), budget_(budget), cmp_(cmp), record_(record), start_(Clock::now()) {}

  const Problem& problem() const { return problem_; }
  std::size_t dimension() const { return problem_.catalog().size(); }
  Comparator comparator() const { return cmp_; }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  std::size_t powerflow_evals() const {
    return record_.counter(EvalClass::powerflow).count + record_.counter(EvalClass::cost).count;
  }

  bool exhausted() const {
    if (budget_.eval_limit && record_.total_evals >= *budget_.eval_limit) return true;
    if (budget_.powerflow_limit && powerflow_evals() >= *budget_.powerflow_limit) return true;
    if (budget_.time_limit_s && elapsed() >= *budget_.time_limit_s) return true;
    return false;
  }

  /// Share of the budget used so far, in [0, 1].
  double progress() const {
    double p = 0.0;
    if (budget_.eval_limit && *budget_.eval_limit > 0)
      p = std::max(p, static_cast<double>(record_.total_evals) / static_cast<double>(*budget_.eval_limit));
    if (budget_.powerflow_limit && *budget_.powerflow_limit > 0)
      p = std::max(p, static_cast<double>(powerflow_evals()) / static_cast<double>(*budget_.powerflow_limit));
    if (budget_.time_limit_s && *budget_.time_limit_s > 0.0) p = std::max(p, elapsed() / *budget_.time_limit_s);
    return std::min(p, 1.0);
  }

  /// Evaluates `c` unless the budget is spent.
  std::optional<EvaluationResult> evaluate(const Candidate& c) {
    if (exhausted()) return std::nullopt;
    const auto t0 = Clock::now();
    EvaluationResult r = problem_.evaluator().evaluate(c);
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    auto& counter = record_.by_class[static_cast<std::size_t>(r.eval_class)];
    ++counter.count;
    counter.seconds += dt;
    ++record_.total_evals;
    if (!record_.best || improves(cmp_, r, *record_.best)) {
      record_.best = r;
      record_.best_candidate = c;
      record_.trajectory.push_back({elapsed(), record_.total_evals, r.level, r.raw_cost, r.normalized, c.hash()});
    }
    return r;
  }

  const std::optional<EvaluationResult>& best() const { return record_.best; }
  const Candidate& best_candidate() const { return record_.best_candidate; }
  RunRecord& record() { return record_; }

 private:
  const Problem& problem_;
  Budget budget_;
  Comparator cmp_;
  RunRecord& record_;
  Clock::time_point start_;
};

}  // namespace gridplan
