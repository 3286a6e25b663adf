#pragma once

#include <cstddef>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/rng.hpp"
#include "gridplan/union_find.hpp"

namespace gridplan {

enum class EdgeSource { branch, bus_switch };

/// A traversable connection between two buses (by bus position).
///
/// `gates` lists the switch positions that must be closed for the edge to
/// conduct; an edge without gates cannot be switched off.
struct TopologyEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  EdgeSource source = EdgeSource::branch;
  std::size_t element = 0;  // branch position in the state, or switch position
  std::vector<std::size_t> gates;

  bool switchable() const { return !gates.empty(); }
};

struct TopologyGraph {
  std::size_t bus_count = 0;
  std::size_t switch_count = 0;
  std::vector<std::size_t> nodes;  // in-service bus positions
  std::vector<TopologyEdge> edges;
};

enum class SwitchView {
  effective,   ///< only edges whose gates are closed in the state
  all_closed,  ///< every in-service edge, as if all switches were closed
};

inline TopologyGraph build_topology(const GridState& state, SwitchView view = SwitchView::effective) {
  const Grid& grid = *state.grid;
  TopologyGraph graph;
  graph.bus_count = grid.buses().size();
  graph.switch_count = grid.switches().size();
  for (std::size_t b = 0; b < grid.buses().size(); ++b)
    if (grid.buses()[b].in_service) graph.nodes.push_back(b);

  auto bus_live = [&](std::size_t b) { return grid.buses()[b].in_service; };
  for (std::size_t i = 0; i < state.branches.size(); ++i) {
    const auto& br = state.branches[i];
    if (!br.in_service) continue;
    std::size_t u = grid.bus_at(br.from_bus);
    std::size_t v = grid.bus_at(br.to_bus);
    if (!bus_live(u) || !bus_live(v)) continue;
    TopologyEdge edge{u, v, EdgeSource::branch, i, {}};
    if (i < state.base_branch_count()) edge.gates = grid.branch_gates(i);
    if (view == SwitchView::effective) {
      bool open = false;
      for (auto s : edge.gates) open = open || !state.switch_closed[s];
      if (open) continue;
    }
    graph.edges.push_back(std::move(edge));
  }
  for (std::size_t s = 0; s < grid.switches().size(); ++s) {
    const auto& sw = grid.switches()[s];
    if (sw.kind != SwitchKind::bus_bus) continue;
    std::size_t u = grid.bus_at(sw.bus);
    std::size_t v = grid.bus_at(sw.other);
    if (!bus_live(u) || !bus_live(v)) continue;
    if (view == SwitchView::effective && !state.switch_closed[s]) continue;
    graph.edges.push_back({u, v, EdgeSource::bus_switch, s, {s}});
  }
  return graph;
}

/// In-service buses hosting a slack injection.
inline std::vector<std::size_t> reference_buses(const GridState& state) {
  const Grid& grid = *state.grid;
  std::vector<bool> mark(grid.buses().size(), false);
  for (const auto& inj : state.injections) {
    if (inj.kind != InjectionKind::slack) continue;
    auto b = grid.bus_at(inj.bus);
    if (grid.buses()[b].in_service) mark[b] = true;
  }
  std::vector<std::size_t> refs;
  for (std::size_t b = 0; b < mark.size(); ++b)
    if (mark[b]) refs.push_back(b);
  return refs;
}

inline UnionFind components(const TopologyGraph& graph) {
  UnionFind uf(graph.bus_count);
  for (const auto& e : graph.edges) uf.unite(e.u, e.v);
  return uf;
}

/// Number of in-service buses not reachable from any reference bus.
inline std::size_t disconnected_count(const TopologyGraph& graph, const std::vector<std::size_t>& reference) {
  if (reference.empty()) throw ConfigurationError("connectivity check needs at least one reference bus");
  UnionFind uf = components(graph);
  std::vector<bool> fed(graph.bus_count, false);
  for (auto r : reference) fed[uf.find(r)] = true;
  std::size_t count = 0;
  for (auto b : graph.nodes)
    if (!fed[uf.find(b)]) ++count;
  return count;
}

inline std::size_t disconnected_count(const GridState& state, const std::vector<std::size_t>& reference) {
  return disconnected_count(build_topology(state), reference);
}

struct SpanningTree {
  std::vector<std::size_t> edges;   // positions in the graph's edge list kept closed
  std::vector<bool> switch_closed;  // resulting state of every switch
};

/// Random spanning tree over the edges of `graph`.
///
/// Unswitchable edges are always kept. Switchable edges are added in a fresh
/// random order (a minimum spanning tree under uniform random weights) and
/// every switchable edge left out of the tree is opened at its first gate.
/// Switches that gate no edge of the graph stay closed.
inline SpanningTree random_spanning_tree(const TopologyGraph& graph, Rng& rng) {
  if (!graph.nodes.empty()) {
    UnionFind all = components(graph);
    for (auto b : graph.nodes)
      if (!all.connected(b, graph.nodes.front()))
        throw InfeasibilityError("grid is disconnected even with every switch closed");
  }
  SpanningTree tree;
  tree.switch_closed.assign(graph.switch_count, true);
  UnionFind uf(graph.bus_count);
  std::vector<std::size_t> switchable;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    if (graph.edges[i].switchable()) {
      switchable.push_back(i);
    } else {
      uf.unite(graph.edges[i].u, graph.edges[i].v);
      tree.edges.push_back(i);
    }
  }
  for (auto k : rng.permutation(switchable.size())) {
    const auto& e = graph.edges[switchable[k]];
    if (uf.unite(e.u, e.v))
      tree.edges.push_back(switchable[k]);
    else
      tree.switch_closed[e.gates.front()] = false;
  }
  return tree;
}

}  // namespace gridplan
