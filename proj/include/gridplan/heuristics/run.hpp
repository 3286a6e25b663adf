#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/heuristics/local_search.hpp"
#include "gridplan/heuristics/population.hpp"
#include "gridplan/heuristics/search.hpp"
#include "gridplan/initial_candidates.hpp"
#include "gridplan/problem.hpp"
#include "gridplan/rng.hpp"

namespace gridplan {

enum class Algorithm { hc, ils, ga, pso, gwo, fwa };

inline constexpr Algorithm all_algorithms[] = {Algorithm::hc,  Algorithm::ils, Algorithm::ga,
                                               Algorithm::pso, Algorithm::gwo, Algorithm::fwa};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::hc:
      return "hc";
    case Algorithm::ils:
      return "ils";
    case Algorithm::ga:
      return "ga";
    case Algorithm::pso:
      return "pso";
    case Algorithm::gwo:
      return "gwo";
    case Algorithm::fwa:
      return "fwa";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto a : all_algorithms)
    if (name == to_string(a)) return a;
  throw ConfigurationError("unknown algorithm '" + name + "'");
}

/// Exploitative algorithms compare lexicographically, population-based ones
/// minimize the normalized cost.
inline Comparator comparator_for(Algorithm a) {
  return a == Algorithm::hc || a == Algorithm::ils ? Comparator::lexicographic : Comparator::normalized;
}

/// Parameters of every algorithm; a run reads only its own block.
struct HeuristicParams {
  IlsParams ils;
  GaParams ga;
  PsoParams pso;
  GwoParams gwo;
  FwaParams fwa;
};

inline std::size_t population_size(Algorithm a, const HeuristicParams& p) {
  switch (a) {
    case Algorithm::ga:
      return p.ga.population;
    case Algorithm::pso:
      return p.pso.particles;
    case Algorithm::gwo:
      return p.gwo.wolves;
    case Algorithm::fwa:
      return p.fwa.fireworks;
    default:
      return 1;
  }
}

/// Starting population: the problem's explicit candidates (cycled), or
/// random spanning-tree switching states.
inline std::vector<Candidate> starting_population(const Problem& problem, std::size_t size, Rng& rng) {
  std::vector<Candidate> pop;
  if (!problem.initial_candidates.empty()) {
    for (std::size_t i = 0; pop.size() < size; ++i)
      pop.push_back(problem.initial_candidates[i % problem.initial_candidates.size()]);
    return pop;
  }
  return generate_initial_candidates(problem.evaluator(), std::max<std::size_t>(size, 1), rng);
}

/// One seeded run of `algo` on `problem` within `budget`.
///
/// Throws InitializationError when no starting population can be built.
inline RunRecord run_heuristic(Algorithm algo, const Problem& problem, const Budget& budget, std::uint64_t seed,
                               const HeuristicParams& params = {}) {
  budget.validate();
  RunRecord record;
  record.algorithm = to_string(algo);
  record.problem = problem.name();
  record.seed = seed;
  record.best_candidate = Candidate(problem.catalog().size());
  if (budget.zero()) return record;

  Rng rng(seed);
  Search search(problem, budget, comparator_for(algo), record);
  std::vector<Candidate> start;
  if (comparator_for(algo) == Comparator::normalized) {
    try {
      start = starting_population(problem, population_size(algo, params), rng);
    } catch (const InfeasibilityError& e) {
      throw InitializationError(std::string("no initial candidates: ") + e.what());
    }
    record.init_s = search.elapsed();
  }

  switch (algo) {
    case Algorithm::hc:
      run_hc(search, rng);
      break;
    case Algorithm::ils:
      run_ils(search, rng, params.ils);
      break;
    case Algorithm::ga:
      run_ga(search, rng, params.ga, start);
      break;
    case Algorithm::pso:
      run_pso(search, rng, params.pso, start);
      break;
    case Algorithm::gwo:
      run_gwo(search, rng, params.gwo, start);
      break;
    case Algorithm::fwa:
      run_fwa(search, rng, params.fwa, start);
      break;
  }
  record.elapsed_s = search.elapsed();
  return record;
}

}  // namespace gridplan
