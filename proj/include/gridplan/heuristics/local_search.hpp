#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>

#include "gridplan/heuristics/neighborhood.hpp"
#include "gridplan/heuristics/search.hpp"

namespace gridplan {

struct IlsParams {
  std::size_t perturbation = 3;
  bool accept_equal = true;  // accept a new local optimum that is not worse
};

struct LocalResult {
  Candidate candidate;
  EvaluationResult result;
  bool local_optimum = false;  // false when the budget ran out first
};

/// Stochastic first-improvement hill climbing under the lexicographic order.
///
/// Sweeps the single-bit neighborhood of the current candidate in a fresh
/// random order and moves on the first strict improvement. Stops when a full
/// sweep brings no improvement or the budget is spent.
inline LocalResult hill_climb(Search& search, Candidate start, EvaluationResult start_result, Rng& rng) {
  LocalResult cur{std::move(start), std::move(start_result), false};
  for (;;) {
    NeighborStream stream(cur.candidate, rng);
    bool moved = false;
    while (auto next = stream.next()) {
      auto r = search.evaluate(next->first);
      if (!r) return cur;
      if (better_lex(*r, cur.result)) {
        cur.candidate = std::move(next->first);
        cur.result = std::move(*r);
        moved = true;
        break;
      }
    }
    if (!moved) {
      cur.local_optimum = true;
      return cur;
    }
  }
}

inline Candidate starting_point(const Problem& problem) {
  if (!problem.initial_candidates.empty()) return problem.initial_candidates.front();
  return Candidate(problem.catalog().size());
}

inline void run_hc(Search& search, Rng& rng) {
  Candidate start = starting_point(search.problem());
  auto r = search.evaluate(start);
  if (!r) return;
  auto local = hill_climb(search, std::move(start), std::move(*r), rng);
  search.record().local_optimum = local.local_optimum;
}

/// Iterated local search: hill climb, then repeatedly perturb the incumbent
/// local optimum by `perturbation` random flips and climb again.
inline void run_ils(Search& search, Rng& rng, const IlsParams& params) {
  Candidate start = starting_point(search.problem());
  auto r = search.evaluate(start);
  if (!r) return;
  LocalResult best = hill_climb(search, std::move(start), std::move(*r), rng);
  const std::size_t k = std::min(params.perturbation, search.dimension());
  if (k == 0) return;
  while (!search.exhausted()) {
    Candidate kicked = perturb(best.candidate, k, rng);
    auto kr = search.evaluate(kicked);
    if (!kr) break;
    LocalResult next = hill_climb(search, std::move(kicked), std::move(*kr), rng);
    const auto order = compare_lex(next.result, best.result);
    if (order < 0 || (params.accept_equal && order == 0)) best = std::move(next);
  }
}

}  // namespace gridplan
