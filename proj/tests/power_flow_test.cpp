#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace gridplan;
using oracle::Cplx;

namespace {

Grid two_bus(double r_ohm, double x_ohm, double p, double q, double vm_slack) {
  return Grid(100.0, {support::bus(1), support::bus(2)}, {support::line(1, 1, 2, r_ohm, x_ohm)}, {},
              {support::slack(1, 1, vm_slack), support::load(2, 2, p, q)});
}

}  // namespace

TEST(TwoBus, MatchesClosedFormVoltage) {
  struct Case {
    double r, x, p, q, vs;
  };
  for (auto c : {Case{0.4, 0.8, 5.0, 2.0, 1.0}, Case{1.2, 0.6, 8.0, 3.0, 1.03}, Case{0.1, 2.0, 2.0, -1.0, 0.98},
                 Case{2.0, 2.0, 0.0, 0.0, 1.0}}) {
    Grid g = two_bus(c.r, c.x, c.p, c.q, c.vs);
    auto res = solve_power_flow(default_state(g));
    ASSERT_TRUE(res.converged);
    const double zb = 20.0 * 20.0 / 100.0;
    const double v2 = oracle::two_bus_vm(c.r / zb, c.x / zb, c.p / 100.0, c.q / 100.0, c.vs);
    EXPECT_NEAR(res.vm_pu[1], v2, 1e-8);
    EXPECT_NEAR(res.vm_pu[0], c.vs, 1e-12);
  }
}

TEST(TwoBus, OverloadedLineDoesNotConverge) {
  Grid g = two_bus(4.0, 8.0, 500.0, 100.0, 1.0);
  auto res = solve_power_flow(default_state(g));
  EXPECT_FALSE(res.converged);
}

TEST(Admittance, MatchesDenseAssembly) {
  Grid g = load_grid(support::data_path("desk14.grid.json"));
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    GridState st = default_state(g);
    for (std::size_t s = 0; s < st.switch_closed.size(); ++s) st.switch_closed[s] = rng.bernoulli(0.5);
    for (auto& br : st.branches) br.parallel = rng.bernoulli(0.3) ? 2 : 1;
    auto net = build_network(st);
    ASSERT_EQ(net.node_count, g.buses().size());
    Eigen::MatrixXcd y(net.ybus);
    auto oracle = oracle::dense_ybus(st);
    for (std::size_t i = 0; i < g.buses().size(); ++i)
      for (std::size_t k = 0; k < g.buses().size(); ++k) {
        const Cplx got = y(net.bus_node[i], net.bus_node[k]);
        EXPECT_NEAR(std::abs(got - oracle[i][k]), 0.0, 1e-9 * (1.0 + std::abs(oracle[i][k])));
      }
  }
}

TEST(Conservation, HoldsOnRandomFeasibleStates) {
  for (auto spec : {support::desk14_spec(), support::feeder120_spec()}) {
    Problem p = load_problem(spec);
    Rng rng(17);
    auto candidates = generate_initial_candidates(p.evaluator(), 50, rng);
    std::size_t checked = 0;
    for (const auto& c : candidates) {
      for (std::size_t k = 0; k < p.load_cases().size(); ++k) {
        GridState st = p.evaluator().state_for(c, k);
        auto res = solve_power_flow(st);
        ASSERT_TRUE(res.converged);
        double gen = 0.0, load = 0.0, losses = 0.0;
        for (double s : res.p_slack_mw) gen += s;
        for (const auto& inj : st.injections) {
          if (!res.energized[p.grid().bus_at(inj.bus)]) continue;
          if (inj.kind == InjectionKind::generator) gen += *inj.p_mw;
          if (inj.kind == InjectionKind::load) load += *inj.p_mw;
        }
        for (std::size_t i = 0; i < st.branches.size(); ++i) {
          const double branch_loss = res.p_from_mw[i] + res.p_to_mw[i];
          EXPECT_GE(branch_loss, -1e-9);
          losses += branch_loss;
        }
        EXPECT_GE(losses, 0.0);
        EXPECT_NEAR(gen, load + losses, 1e-6);
        EXPECT_LT(oracle::mismatch_mva(st, res), PfOptions{}.tolerance());
        EXPECT_LT(res.max_mismatch_mva, PfOptions{}.tolerance());
        ++checked;
      }
    }
    EXPECT_EQ(checked, 50 * p.load_cases().size());
  }
}

TEST(Islands, UnfedBusWithoutInjectionIsDeEnergized) {
  using support::bus;
  Grid g(100.0, {bus(1), bus(2), bus(3)}, {support::line(1, 1, 2, 0.4, 0.8), support::line(2, 2, 3, 0.4, 0.8)},
         {support::gate(1, 2, 2, false)}, {support::slack(1, 1), support::load(2, 2, 1.0, 0.3)});
  auto res = solve_power_flow(default_state(g));
  ASSERT_TRUE(res.converged);
  EXPECT_TRUE(res.energized[1]);
  EXPECT_FALSE(res.energized[2]);
  EXPECT_TRUE(std::isnan(res.vm_pu[2]));
}

TEST(Islands, UnfedLoadPreventsConvergence) {
  using support::bus;
  Grid g(100.0, {bus(1), bus(2), bus(3)}, {support::line(1, 1, 2, 0.4, 0.8), support::line(2, 2, 3, 0.4, 0.8)},
         {support::gate(1, 2, 2, false)}, {support::slack(1, 1), support::load(2, 3, 1.0, 0.3)});
  EXPECT_FALSE(solve_power_flow(default_state(g)).converged);
}

TEST(WarmStart, PreviousSolutionGivesSameVoltages) {
  Problem p = load_problem(support::desk14_spec());
  GridState st = p.evaluator().state_for(Candidate(p.catalog().size()), 0);
  auto flat = solve_power_flow(st);
  ASSERT_TRUE(flat.converged);
  PfOptions warm;
  warm.init = PfInit::previous;
  auto again = solve_power_flow(st, warm, &flat);
  ASSERT_TRUE(again.converged);
  EXPECT_LE(again.iterations, 1);
  for (std::size_t b = 0; b < flat.vm_pu.size(); ++b) EXPECT_NEAR(again.vm_pu[b], flat.vm_pu[b], 1e-9);
}

TEST(Loading, UsesLargerEndCurrentAndParallelRating) {
  Grid g = two_bus(0.4, 0.8, 5.0, 2.0, 1.0);
  GridState st = default_state(g);
  auto one = solve_power_flow(st);
  st.branches[0].parallel = 2;
  auto two = solve_power_flow(st);
  ASSERT_TRUE(one.converged && two.converged);
  const double expected = std::max(one.i_from_ka[0], one.i_to_ka[0]) / 0.4 * 100.0;
  EXPECT_NEAR(one.branch_loading_percent[0], expected, 1e-12);
  EXPECT_LT(two.branch_loading_percent[0], one.branch_loading_percent[0] / 2.0 + 1e-6);
  auto recomputed = branch_loadings(one, default_state(g));
  EXPECT_NEAR(recomputed[0], one.branch_loading_percent[0], 1e-9);
}
