#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace gridplan;

namespace {

class FixtureTopology : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(FixtureTopology, DisconnectedCountMatchesBfs) {
  Grid g = load_grid(support::data_path(GetParam() + ".grid.json"));
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    GridState st = default_state(g);
    for (std::size_t s = 0; s < st.switch_closed.size(); ++s) st.switch_closed[s] = rng.bernoulli(0.6);
    for (auto& br : st.branches)
      if (rng.bernoulli(0.05)) br.in_service = false;
    EXPECT_EQ(disconnected_count(st, reference_buses(st)), oracle::bfs_disconnected(st)) << "trial " << trial;
  }
}

TEST_P(FixtureTopology, SpanningTreesAreTrees) {
  Grid g = load_grid(support::data_path(GetParam() + ".grid.json"));
  const GridState base = default_state(g);
  const TopologyGraph graph = build_topology(base, SwitchView::all_closed);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto tree = random_spanning_tree(graph, rng);
    ASSERT_EQ(tree.edges.size(), graph.nodes.size() - 1);
    UnionFind uf(graph.bus_count);
    for (auto e : tree.edges) EXPECT_TRUE(uf.unite(graph.edges[e].u, graph.edges[e].v)) << "cycle";
    for (std::size_t e = 0; e < graph.edges.size(); ++e)
      if (!graph.edges[e].switchable())
        EXPECT_NE(std::find(tree.edges.begin(), tree.edges.end(), e), tree.edges.end());

    // the switch states alone reproduce the tree
    GridState st = base;
    st.switch_closed = tree.switch_closed;
    const TopologyGraph effective = build_topology(st);
    EXPECT_EQ(effective.edges.size(), graph.nodes.size() - 1);
    EXPECT_EQ(disconnected_count(st, reference_buses(st)), 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, FixtureTopology, ::testing::Values("desk14", "feeder120"));

TEST(SpanningTree, BusBusSwitchesAreEdges) {
  using support::bus;
  Switch coupler;
  coupler.id = 9;
  coupler.kind = SwitchKind::bus_bus;
  coupler.bus = 1;
  coupler.other = 3;
  Grid g(100.0, {bus(1), bus(2), bus(3)}, {support::line(1, 1, 2, 0.1, 0.1), support::line(2, 2, 3, 0.1, 0.1)},
         {support::gate(5, 2, 2, true), coupler}, {support::slack(1, 1)});
  auto graph = build_topology(default_state(g), SwitchView::all_closed);
  Rng rng(1);
  std::set<std::vector<bool>> seen;
  for (int i = 0; i < 40; ++i) {
    auto tree = random_spanning_tree(graph, rng);
    EXPECT_EQ(tree.edges.size(), 2u);
    EXPECT_EQ(std::count(tree.switch_closed.begin(), tree.switch_closed.end(), false), 1);
    seen.insert(tree.switch_closed);
  }
  EXPECT_EQ(seen.size(), 2u);
}

TEST(SpanningTree, DisconnectedGraphIsInfeasible) {
  using support::bus;
  Grid g(100.0, {bus(1), bus(2), bus(3)}, {support::line(1, 1, 2, 0.1, 0.1)}, {}, {support::slack(1, 1)});
  auto graph = build_topology(default_state(g), SwitchView::all_closed);
  Rng rng(1);
  EXPECT_THROW(random_spanning_tree(graph, rng), InfeasibilityError);
}

TEST(Connectivity, NoSlackIsAConfigurationError) {
  using support::bus;
  Grid g(100.0, {bus(1), bus(2)}, {support::line(1, 1, 2, 0.1, 0.1)}, {}, {});
  GridState st = default_state(g);
  EXPECT_THROW(disconnected_count(st, reference_buses(st)), ConfigurationError);
}
