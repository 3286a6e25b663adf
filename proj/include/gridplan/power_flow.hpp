#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/union_find.hpp"

namespace gridplan {

using Complex = std::complex<double>;
using AdmittanceMatrix = Eigen::SparseMatrix<Complex>;

enum class PfInit { flat, previous };

struct PfOptions {
  /// Mismatch tolerance in MVA, 1e-8 when unset.
  std::optional<double> tol_mva;
  int max_iter = 30;
  PfInit init = PfInit::flat;

  double tolerance() const { return tol_mva.value_or(1e-8); }
};

/// Solution of one power flow. Per-bus vectors follow the grid's bus order,
/// per-branch vectors follow `GridState::branches`. Buses that are out of
/// service or sit in an island without a slack are not energized and carry NaN.
struct PfResult {
  bool converged = false;
  int iterations = 0;
  double max_mismatch_mva = std::numeric_limits<double>::infinity();
  std::vector<double> vm_pu;
  std::vector<double> va_degree;
  std::vector<bool> energized;
  std::vector<double> branch_loading_percent;
  std::vector<double> i_from_ka;
  std::vector<double> i_to_ka;
  std::vector<double> p_from_mw;
  std::vector<double> q_from_mvar;
  std::vector<double> p_to_mw;
  std::vector<double> q_to_mvar;
  std::vector<std::size_t> slack_injections;  // injection positions, one entry per slack
  std::vector<double> p_slack_mw;
  std::vector<double> q_slack_mvar;
};

/// Pi-model of one branch in per-unit on the system base.
struct BranchModel {
  bool active = false;
  std::size_t from_node = 0;
  std::size_t to_node = 0;
  Complex yff, yft, ytf, ytt;
};

/// Bus-fused per-unit network of a grid state.
///
/// Closed bus-bus switches merge their buses into one node; branches are
/// active when in service, all their bus-line switches are closed and their
/// ends land on different nodes.
struct NetworkModel {
  std::vector<std::ptrdiff_t> bus_node;  // -1 for out-of-service buses
  std::size_t node_count = 0;
  std::vector<BranchModel> branches;
  AdmittanceMatrix ybus;
};

inline BranchModel branch_model(const Branch& br, double vn_from_kv, double base_mva) {
  const double z_base = vn_from_kv * vn_from_kv / base_mva;
  const Complex z(br.r_ohm / z_base, br.x_ohm / z_base);
  const double n = static_cast<double>(br.parallel);
  const Complex ys = n / z;
  const Complex half_shunt(0.0, n * br.b_total_us * 1e-6 * z_base / 2.0);
  BranchModel m;
  m.yff = ys + half_shunt;
  m.ytt = ys + half_shunt;
  m.yft = -ys;
  m.ytf = -ys;
  return m;
}

inline NetworkModel build_network(const GridState& state) {
  const Grid& grid = *state.grid;
  const auto& buses = grid.buses();
  NetworkModel net;

  UnionFind fuse(buses.size());
  for (std::size_t s = 0; s < grid.switches().size(); ++s) {
    const auto& sw = grid.switches()[s];
    if (sw.kind != SwitchKind::bus_bus || !state.switch_closed[s]) continue;
    auto a = grid.bus_at(sw.bus);
    auto b = grid.bus_at(sw.other);
    if (buses[a].in_service && buses[b].in_service) fuse.unite(a, b);
  }
  net.bus_node.assign(buses.size(), -1);
  std::vector<std::ptrdiff_t> root_node(buses.size(), -1);
  for (std::size_t b = 0; b < buses.size(); ++b) {
    if (!buses[b].in_service) continue;
    auto r = fuse.find(b);
    if (root_node[r] < 0) root_node[r] = static_cast<std::ptrdiff_t>(net.node_count++);
    net.bus_node[b] = root_node[r];
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t n = 0; n < net.node_count; ++n) triplets.emplace_back(n, n, Complex{});
  net.branches.resize(state.branches.size());
  for (std::size_t i = 0; i < state.branches.size(); ++i) {
    const auto& br = state.branches[i];
    if (!br.in_service) continue;
    if (i < state.base_branch_count()) {
      bool open = false;
      for (auto s : grid.branch_gates(i)) open = open || !state.switch_closed[s];
      if (open) continue;
    }
    auto f = grid.bus_at(br.from_bus);
    auto t = grid.bus_at(br.to_bus);
    if (net.bus_node[f] < 0 || net.bus_node[t] < 0 || net.bus_node[f] == net.bus_node[t]) continue;
    BranchModel m = branch_model(br, buses[f].vn_kv, grid.base_mva());
    m.active = true;
    m.from_node = static_cast<std::size_t>(net.bus_node[f]);
    m.to_node = static_cast<std::size_t>(net.bus_node[t]);
    triplets.emplace_back(m.from_node, m.from_node, m.yff);
    triplets.emplace_back(m.from_node, m.to_node, m.yft);
    triplets.emplace_back(m.to_node, m.from_node, m.ytf);
    triplets.emplace_back(m.to_node, m.to_node, m.ytt);
    net.branches[i] = m;
  }
  const auto n = static_cast<Eigen::Index>(net.node_count);
  net.ybus.resize(n, n);
  net.ybus.setFromTriplets(triplets.begin(), triplets.end());
  net.ybus.makeCompressed();
  return net;
}

/// Bus admittance matrix in per-unit, indexed by fused node.
inline AdmittanceMatrix build_admittance(const GridState& state) { return build_network(state).ybus; }

namespace detail {

enum class NodeType { pq, pv, slack };

struct NodeSpec {
  NodeType type = NodeType::pq;
  Complex s_spec{};  // net specified injection, per-unit
  double vm_set = 1.0;
  double va_set_rad = 0.0;
  bool has_injection = false;
};

inline std::vector<NodeSpec> node_specs(const GridState& state, const NetworkModel& net) {
  const Grid& grid = *state.grid;
  const double base = grid.base_mva();
  std::vector<NodeSpec> spec(net.node_count);
  for (const auto& inj : state.injections) {
    auto node = net.bus_node[grid.bus_at(inj.bus)];
    if (node < 0) continue;
    auto& ns = spec[static_cast<std::size_t>(node)];
    switch (inj.kind) {
      case InjectionKind::load:
        ns.s_spec -= Complex(inj.p_mw.value_or(0.0), inj.q_mvar.value_or(0.0)) / base;
        ns.has_injection = ns.has_injection || inj.p_mw.value_or(0.0) != 0.0 || inj.q_mvar.value_or(0.0) != 0.0;
        break;
      case InjectionKind::generator:
        ns.s_spec += Complex(inj.p_mw.value_or(0.0), inj.q_mvar.value_or(0.0)) / base;
        ns.has_injection = true;
        if (inj.vm_pu && ns.type == NodeType::pq) {
          ns.type = NodeType::pv;
          ns.vm_set = *inj.vm_pu;
        }
        break;
      case InjectionKind::slack:
        if (ns.type != NodeType::slack) {
          ns.type = NodeType::slack;
          ns.vm_set = inj.vm_pu.value_or(1.0);
          ns.va_set_rad = inj.va_degree.value_or(0.0) * std::numbers::pi / 180.0;
        }
        ns.has_injection = true;
        break;
    }
  }
  return spec;
}

inline Eigen::VectorXcd node_currents(const AdmittanceMatrix& ybus, const Eigen::VectorXcd& v) { return ybus * v; }

}  // namespace detail

/// Fills per-branch currents, flows and loading from node voltages.
inline void fill_branch_quantities(PfResult& result, const GridState& state, const NetworkModel& net,
                                   const Eigen::VectorXcd& v) {
  const Grid& grid = *state.grid;
  const double base = grid.base_mva();
  const std::size_t nb = state.branches.size();
  result.branch_loading_percent.assign(nb, 0.0);
  result.i_from_ka.assign(nb, 0.0);
  result.i_to_ka.assign(nb, 0.0);
  result.p_from_mw.assign(nb, 0.0);
  result.q_from_mvar.assign(nb, 0.0);
  result.p_to_mw.assign(nb, 0.0);
  result.q_to_mvar.assign(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& m = net.branches[i];
    if (!m.active) continue;
    const auto& br = state.branches[i];
    const Complex vf = v[static_cast<Eigen::Index>(m.from_node)];
    const Complex vt = v[static_cast<Eigen::Index>(m.to_node)];
    const Complex i_f = m.yff * vf + m.yft * vt;
    const Complex i_t = m.ytf * vf + m.ytt * vt;
    const Complex s_f = vf * std::conj(i_f) * base;
    const Complex s_t = vt * std::conj(i_t) * base;
    const double vn_f = grid.buses()[grid.bus_at(br.from_bus)].vn_kv;
    const double vn_t = grid.buses()[grid.bus_at(br.to_bus)].vn_kv;
    result.i_from_ka[i] = std::abs(i_f) * base / (std::sqrt(3.0) * vn_f);
    result.i_to_ka[i] = std::abs(i_t) * base / (std::sqrt(3.0) * vn_t);
    result.p_from_mw[i] = s_f.real();
    result.q_from_mvar[i] = s_f.imag();
    result.p_to_mw[i] = s_t.real();
    result.q_to_mvar[i] = s_t.imag();
    result.branch_loading_percent[i] =
        std::max(result.i_from_ka[i], result.i_to_ka[i]) / (br.max_i_ka * br.parallel) * 100.0;
  }
}

/// Newton-Raphson AC power flow in polar coordinates.
///
/// Non-convergence (iteration cap, singular Jacobian, non-finite iterates,
/// or an island with injections but no slack) is reported through
/// `converged = false`, never thrown.
inline PfResult solve_power_flow(const GridState& state, const PfOptions& opts = {},
                                 const PfResult* previous = nullptr) {
  const Grid& grid = *state.grid;
  const double base = grid.base_mva();
  const double tol = opts.tolerance();
  const std::size_t nbus = grid.buses().size();

  NetworkModel net = build_network(state);
  auto spec = detail::node_specs(state, net);
  const std::size_t nn = net.node_count;

  PfResult result;
  result.vm_pu.assign(nbus, std::numeric_limits<double>::quiet_NaN());
  result.va_degree.assign(nbus, std::numeric_limits<double>::quiet_NaN());
  result.energized.assign(nbus, false);

  // Islands by node; only islands holding a slack are solved.
  UnionFind islands(nn);
  for (const auto& m : net.branches)
    if (m.active) islands.unite(m.from_node, m.to_node);
  std::vector<std::ptrdiff_t> island_slack(nn, -1);
  for (std::size_t n = 0; n < nn; ++n)
    if (spec[n].type == detail::NodeType::slack && island_slack[islands.find(n)] < 0)
      island_slack[islands.find(n)] = static_cast<std::ptrdiff_t>(n);
  std::vector<bool> live(nn, false);
  bool orphan_injection = false;
  for (std::size_t n = 0; n < nn; ++n) {
    live[n] = island_slack[islands.find(n)] >= 0;
    if (!live[n] && spec[n].has_injection) orphan_injection = true;
  }

  std::vector<std::size_t> pvpq, pq;
  for (std::size_t n = 0; n < nn; ++n) {
    if (!live[n] || spec[n].type == detail::NodeType::slack) continue;
    pvpq.push_back(n);
    if (spec[n].type == detail::NodeType::pq) pq.push_back(n);
  }
  std::vector<std::ptrdiff_t> col_angle(nn, -1), col_mag(nn, -1);
  for (std::size_t k = 0; k < pvpq.size(); ++k) col_angle[pvpq[k]] = static_cast<std::ptrdiff_t>(k);
  for (std::size_t k = 0; k < pq.size(); ++k) col_mag[pq[k]] = static_cast<std::ptrdiff_t>(pvpq.size() + k);
  const auto dim = static_cast<Eigen::Index>(pvpq.size() + pq.size());

  // Initial voltages: setpoint magnitudes, island reference angle.
  Eigen::VectorXd vm = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
  Eigen::VectorXd va = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
  for (std::size_t n = 0; n < nn; ++n) {
    if (!live[n]) continue;
    const auto& ref = spec[static_cast<std::size_t>(island_slack[islands.find(n)])];
    vm[n] = spec[n].type == detail::NodeType::pq ? 1.0 : spec[n].vm_set;
    va[n] = spec[n].type == detail::NodeType::slack ? spec[n].va_set_rad : ref.va_set_rad;
  }
  if (opts.init == PfInit::previous && previous != nullptr && previous->vm_pu.size() == nbus) {
    for (std::size_t b = 0; b < nbus; ++b) {
      auto node = net.bus_node[b];
      if (node < 0 || !live[node] || !std::isfinite(previous->vm_pu[b])) continue;
      if (spec[node].type == detail::NodeType::pq) vm[node] = previous->vm_pu[b];
      if (spec[node].type != detail::NodeType::slack) va[node] = previous->va_degree[b] * std::numbers::pi / 180.0;
    }
  }

  auto voltages = [&]() {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(nn));
    for (std::size_t n = 0; n < nn; ++n) v[n] = std::polar(vm[n], va[n]);
    return v;
  };

  Eigen::VectorXcd v = voltages();
  Eigen::VectorXcd ibus;
  Eigen::VectorXd mismatch(dim);
  auto evaluate_mismatch = [&]() {
    ibus = detail::node_currents(net.ybus, v);
    double worst = 0.0;
    for (std::size_t k = 0; k < pvpq.size(); ++k) {
      auto n = pvpq[k];
      Complex s = v[n] * std::conj(ibus[n]) - spec[n].s_spec;
      mismatch[static_cast<Eigen::Index>(k)] = s.real();
      worst = std::max(worst, std::abs(s.real()));
      if (col_mag[n] >= 0) {
        mismatch[col_mag[n]] = s.imag();
        worst = std::max(worst, std::abs(s.imag()));
      }
    }
    return worst * base;
  };

  bool ok = !orphan_injection;
  double worst = evaluate_mismatch();
  int iter = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> jac;
  while (ok && !(worst < tol)) {
    if (iter >= opts.max_iter || !std::isfinite(worst)) {
      ok = false;
      break;
    }
    jac.clear();
    for (Eigen::Index col = 0; col < net.ybus.outerSize(); ++col) {
      for (AdmittanceMatrix::InnerIterator it(net.ybus, col); it; ++it) {
        const auto i = static_cast<std::size_t>(it.row());
        const auto k = static_cast<std::size_t>(it.col());
        if (col_angle[i] < 0) continue;  // slack or dead row
        const Complex y = it.value();
        // dS_i/dVa_k and dS_i/dVm_k
        Complex ds_dva = -Complex(0.0, 1.0) * v[i] * std::conj(y * v[k]);
        Complex ds_dvm = v[i] * std::conj(y * v[k] / vm[k]);
        if (i == k) {
          ds_dva += Complex(0.0, 1.0) * v[i] * std::conj(ibus[i]);
          ds_dvm += std::conj(ibus[i]) * v[i] / vm[i];
        }
        const auto row_p = col_angle[i];
        const auto row_q = col_mag[i];
        if (col_angle[k] >= 0) {
          jac.emplace_back(row_p, col_angle[k], ds_dva.real());
          if (row_q >= 0) jac.emplace_back(row_q, col_angle[k], ds_dva.imag());
        }
        if (col_mag[k] >= 0) {
          jac.emplace_back(row_p, col_mag[k], ds_dvm.real());
          if (row_q >= 0) jac.emplace_back(row_q, col_mag[k], ds_dvm.imag());
        }
      }
    }
    Eigen::SparseMatrix<double> jacobian(dim, dim);
    jacobian.setFromTriplets(jac.begin(), jac.end());
    jacobian.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(jacobian);
      analyzed = true;
    }
    lu.factorize(jacobian);
    if (lu.info() != Eigen::Success) {
      ok = false;
      break;
    }
    Eigen::VectorXd dx = lu.solve(-mismatch);
    if (lu.info() != Eigen::Success || !dx.allFinite()) {
      ok = false;
      break;
    }
    for (std::size_t k = 0; k < pvpq.size(); ++k) va[pvpq[k]] += dx[static_cast<Eigen::Index>(k)];
    for (auto n : pq) vm[n] += dx[col_mag[n]];
    v = voltages();
    worst = evaluate_mismatch();
    ++iter;
  }

  result.iterations = iter;
  result.max_mismatch_mva = worst;
  result.converged = ok && worst < tol;
  if (!result.converged) return result;

  for (std::size_t b = 0; b < nbus; ++b) {
    auto node = net.bus_node[b];
    if (node < 0 || !live[node]) continue;
    result.energized[b] = true;
    result.vm_pu[b] = vm[node];
    result.va_degree[b] = va[node] * 180.0 / std::numbers::pi;
  }
  fill_branch_quantities(result, state, net, v);

  // Slack injections balance the node: calculated injection minus the other
  // elements at the node. Several slacks on one node: the first carries it.
  std::vector<bool> taken(nn, false);
  for (std::size_t j = 0; j < state.injections.size(); ++j) {
    const auto& inj = state.injections[j];
    if (inj.kind != InjectionKind::slack) continue;
    auto node = net.bus_node[grid.bus_at(inj.bus)];
    result.slack_injections.push_back(j);
    if (node < 0 || !live[node] || taken[node]) {
      result.p_slack_mw.push_back(0.0);
      result.q_slack_mvar.push_back(0.0);
      continue;
    }
    taken[node] = true;
    Complex s = (v[node] * std::conj(ibus[node]) - spec[node].s_spec) * base;
    result.p_slack_mw.push_back(s.real());
    result.q_slack_mvar.push_back(s.imag());
  }
  return result;
}

/// Loading in percent of the thermal limit: max(|I_from|, |I_to|) / (max_i_ka * parallel) * 100.
inline std::vector<double> branch_loadings(const PfResult& result, const GridState& state) {
  if (!result.converged) throw UsageError("branch loadings requested for a non-converged power flow");
  NetworkModel net = build_network(state);
  const Grid& grid = *state.grid;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.node_count));
  for (std::size_t b = 0; b < grid.buses().size(); ++b) {
    auto node = net.bus_node[b];
    if (node < 0 || !result.energized[b]) continue;
    v[node] = std::polar(result.vm_pu[b], result.va_degree[b] * std::numbers::pi / 180.0);
  }
  PfResult scratch;
  fill_branch_quantities(scratch, state, net, v);
  return scratch.branch_loading_percent;
}

}  // namespace gridplan
