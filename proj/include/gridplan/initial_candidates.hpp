#pragma once

#include <cstddef>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/evaluation.hpp"
#include "gridplan/measures.hpp"
#include "gridplan/rng.hpp"
#include "gridplan/topology.hpp"

namespace gridplan {

/// Candidate whose SWITCH bits realize `closed` (one flag per switch position)
/// relative to the switches' default states. Other bits stay zero.
inline Candidate switching_candidate(const Grid& grid, const MeasureCatalog& catalog, const std::vector<bool>& closed) {
  Candidate c(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& m = catalog[i];
    if (m.kind != MeasureKind::toggle_switch) continue;
    auto s = *grid.switch_index(m.element);
    c.set(i, closed[s] != grid.switches()[s].closed_default);
  }
  return c;
}

/// `n` switching-state candidates that are connected and power-flow convergent
/// in every load case.
///
/// Each candidate starts from a random spanning tree. While the evaluator
/// reports disconnected buses or non-convergence, ceil(N/2) of the N switches
/// still open are closed uniformly at random and the state is re-evaluated.
inline std::vector<Candidate> generate_initial_candidates(const Evaluator& evaluator, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("number of initial candidates must be at least 1");
  const Grid& grid = evaluator.grid();
  const MeasureCatalog& catalog = evaluator.catalog();
  const TopologyGraph graph = build_topology(default_state(grid), SwitchView::all_closed);

  std::vector<Candidate> out;
  out.reserve(n);
  while (out.size() < n) {
    std::vector<bool> closed = random_spanning_tree(graph, rng).switch_closed;
    for (;;) {
      Candidate c = switching_candidate(grid, catalog, closed);
      if (evaluator.evaluate(c).level <= level::line_loading) {
        out.push_back(std::move(c));
        break;
      }
      std::vector<std::size_t> open;
      for (std::size_t s = 0; s < closed.size(); ++s)
        if (!closed[s]) open.push_back(s);
      if (open.empty())
        throw InfeasibilityError("grid is disconnected or non-convergent even with every switch closed");
      for (auto k : rng.sample(open.size(), (open.size() + 1) / 2)) closed[open[k]] = true;
    }
  }
  return out;
}

}  // namespace gridplan
