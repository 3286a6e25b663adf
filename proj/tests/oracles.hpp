#pragma once

// Independent reference computations used by the unit tests and the
// acceptance run. None of them call into the code under test beyond the
// plain data types.

#include <complex>
#include <deque>
#include <numbers>
#include <vector>

#include "gridplan/gridplan.hpp"

namespace oracle {

using Cplx = std::complex<double>;
using Dense = std::vector<std::vector<Cplx>>;

/// Load-bus voltage magnitude of a slack feeding one PQ load over a series
/// impedance (all per unit): the high-voltage root of
/// |V2|^4 + (2(RP + XQ) - |V1|^2)|V2|^2 + |Z|^2 |S|^2 = 0.
inline double two_bus_vm(double r, double x, double p, double q, double v1) {
  const double b = 2.0 * (r * p + x * q) - v1 * v1;
  const double c = (r * r + x * x) * (p * p + q * q);
  return std::sqrt((-b + std::sqrt(b * b - 4.0 * c)) / 2.0);
}

inline bool gate_open(const gridplan::GridState& st, std::size_t branch) {
  const auto& g = *st.grid;
  if (branch >= g.branches().size()) return false;
  for (std::size_t s = 0; s < g.switches().size(); ++s) {
    const auto& sw = g.switches()[s];
    if (sw.kind == gridplan::SwitchKind::bus_line && sw.other == g.branches()[branch].id && !st.switch_closed[s])
      return true;
  }
  return false;
}

/// Bus-indexed admittance matrix assembled entry by entry. Valid for grids
/// without bus-bus switches, transformers or out-of-service buses.
inline Dense dense_ybus(const gridplan::GridState& st) {
  const auto& g = *st.grid;
  const std::size_t n = g.buses().size();
  Dense y(n, std::vector<Cplx>(n));
  for (std::size_t i = 0; i < st.branches.size(); ++i) {
    const auto& br = st.branches[i];
    if (!br.in_service || gate_open(st, i)) continue;
    const auto f = g.bus_at(br.from_bus), t = g.bus_at(br.to_bus);
    const double zb = g.buses()[f].vn_kv * g.buses()[f].vn_kv / g.base_mva();
    const Cplx series = static_cast<double>(br.parallel) / Cplx(br.r_ohm / zb, br.x_ohm / zb);
    const Cplx shunt(0.0, br.parallel * br.b_total_us * 1e-6 * zb / 2.0);
    y[f][f] += series + shunt;
    y[t][t] += series + shunt;
    y[f][t] -= series;
    y[t][f] -= series;
  }
  return y;
}

/// Largest nodal power mismatch in MVA at non-slack energized buses,
/// recomputed from the returned voltages (reactive part skipped at PV buses).
inline double mismatch_mva(const gridplan::GridState& st, const gridplan::PfResult& r) {
  using gridplan::InjectionKind;
  const auto& g = *st.grid;
  const std::size_t n = g.buses().size();
  const auto y = dense_ybus(st);
  std::vector<Cplx> v(n), spec(n);
  for (std::size_t b = 0; b < n; ++b)
    if (r.energized[b]) v[b] = std::polar(r.vm_pu[b], r.va_degree[b] * std::numbers::pi / 180.0);
  std::vector<bool> slack(n, false), pv(n, false);
  for (const auto& inj : st.injections) {
    const auto b = g.bus_at(inj.bus);
    if (inj.kind == InjectionKind::load) spec[b] -= Cplx(*inj.p_mw, *inj.q_mvar);
    if (inj.kind == InjectionKind::generator) {
      spec[b] += Cplx(*inj.p_mw, inj.q_mvar.value_or(0.0));
      if (inj.vm_pu) pv[b] = true;
    }
    if (inj.kind == InjectionKind::slack) slack[b] = true;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (slack[i] || !r.energized[i]) continue;
    Cplx current{};
    for (std::size_t k = 0; k < n; ++k) current += y[i][k] * v[k];
    const Cplx d = v[i] * std::conj(current) * g.base_mva() - spec[i];
    worst = std::max(worst, std::abs(d.real()));
    if (!pv[i]) worst = std::max(worst, std::abs(d.imag()));
  }
  return worst;
}

struct Balance {
  double generation_mw = 0.0;
  double load_mw = 0.0;
  double losses_mw = 0.0;
  double min_branch_loss_mw = 0.0;
};

inline Balance active_balance(const gridplan::GridState& st, const gridplan::PfResult& r) {
  using gridplan::InjectionKind;
  Balance b;
  for (double s : r.p_slack_mw) b.generation_mw += s;
  for (const auto& inj : st.injections) {
    if (!r.energized[st.grid->bus_at(inj.bus)]) continue;
    if (inj.kind == InjectionKind::generator) b.generation_mw += *inj.p_mw;
    if (inj.kind == InjectionKind::load) b.load_mw += *inj.p_mw;
  }
  for (std::size_t i = 0; i < st.branches.size(); ++i) {
    const double loss = r.p_from_mw[i] + r.p_to_mw[i];
    b.losses_mw += loss;
    b.min_branch_loss_mw = std::min(b.min_branch_loss_mw, loss);
  }
  return b;
}

/// Buses not reachable from a slack by breadth-first search over conducting elements.
inline std::size_t bfs_disconnected(const gridplan::GridState& st) {
  using namespace gridplan;
  const Grid& g = *st.grid;
  const std::size_t n = g.buses().size();
  std::vector<std::vector<std::size_t>> adj(n);
  auto live = [&](std::size_t b) { return g.buses()[b].in_service; };
  auto link = [&](std::size_t u, std::size_t v) {
    if (!live(u) || !live(v)) return;
    adj[u].push_back(v);
    adj[v].push_back(u);
  };
  for (std::size_t i = 0; i < st.branches.size(); ++i)
    if (st.branches[i].in_service && !gate_open(st, i))
      link(g.bus_at(st.branches[i].from_bus), g.bus_at(st.branches[i].to_bus));
  for (std::size_t s = 0; s < g.switches().size(); ++s) {
    const auto& sw = g.switches()[s];
    if (sw.kind == SwitchKind::bus_bus && st.switch_closed[s]) link(g.bus_at(sw.bus), g.bus_at(sw.other));
  }
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue;
  for (const auto& inj : st.injections) {
    if (inj.kind != InjectionKind::slack) continue;
    auto b = g.bus_at(inj.bus);
    if (live(b) && !seen[b]) {
      seen[b] = true;
      queue.push_back(b);
    }
  }
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
  }
  std::size_t count = 0;
  for (std::size_t b = 0; b < n; ++b)
    if (live(b) && !seen[b]) ++count;
  return count;
}

/// Closed branches and bus-bus couplers between in-service buses.
inline std::size_t conducting_elements(const gridplan::GridState& st) {
  using namespace gridplan;
  const Grid& g = *st.grid;
  auto live = [&](int id) { return g.buses()[g.bus_at(id)].in_service; };
  std::size_t n = 0;
  for (std::size_t i = 0; i < st.branches.size(); ++i) {
    const auto& br = st.branches[i];
    if (br.in_service && !gate_open(st, i) && live(br.from_bus) && live(br.to_bus)) ++n;
  }
  for (std::size_t s = 0; s < g.switches().size(); ++s) {
    const auto& sw = g.switches()[s];
    if (sw.kind == SwitchKind::bus_bus && st.switch_closed[s] && live(sw.bus) && live(sw.other)) ++n;
  }
  return n;
}

/// Twice the signed triangle area, plain double arithmetic.
inline double orient2(const gridplan::Point2& a, const gridplan::Point2& b, const gridplan::Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Whether `d` lies strictly inside the circle through a, b, c, from the
/// explicit circumcenter and radius. `slack` absorbs rounding near the circle.
inline bool inside_circumcircle(const gridplan::Point2& a, const gridplan::Point2& b, const gridplan::Point2& c,
                                const gridplan::Point2& d, double slack = 1e-9) {
  const double den = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
  const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / den;
  const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / den;
  const double r = std::hypot(a.x - ux, a.y - uy);
  return std::hypot(d.x - ux, d.y - uy) < r * (1.0 - slack);
}

/// An edge is Delaunay when it borders some triangle whose circumcircle
/// holds no other point.
inline bool empty_circle_edge(const std::vector<gridplan::Point2>& pts, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == i || k == j || orient2(pts[i], pts[j], pts[k]) == 0.0) continue;
    bool empty = true;
    for (std::size_t m = 0; m < pts.size() && empty; ++m)
      if (m != i && m != j && m != k && inside_circumcircle(pts[i], pts[j], pts[k], pts[m])) empty = false;
    if (empty) return true;
  }
  return false;
}

/// Distinct points on a 1 m grid inside a 100 km square.
inline std::vector<gridplan::Point2> random_points(gridplan::Rng& rng, std::size_t n) {
  std::vector<gridplan::Point2> pts;
  while (pts.size() < n) {
    gridplan::Point2 p{std::round(rng.uniform(0.0, 100.0) * 1000.0) / 1000.0,
                       std::round(rng.uniform(0.0, 100.0) * 1000.0) / 1000.0};
    bool dup = false;
    for (const auto& q : pts) dup = dup || (q.x == p.x && q.y == p.y);
    if (!dup) pts.push_back(p);
  }
  return pts;
}

}  // namespace oracle
