#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gridplan/errors.hpp"

namespace gridplan {

struct GeoPoint {
  double x_km = 0.0;
  double y_km = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct Bus {
  int id = 0;
  std::string name;
  double vn_kv = 0.0;
  double min_vm_pu = 0.9;
  double max_vm_pu = 1.1;
  std::optional<GeoPoint> geo;
  bool in_service = true;
  bool operator==(const Bus&) const = default;
};

enum class BranchKind { line, transformer };

/// Series-impedance pi-model branch. Impedances are totals in ohm referred to
/// the from-side nominal voltage; transformers use length 0 and a fixed ratio
/// equal to the ratio of the nominal voltages.
struct Branch {
  int id = 0;
  BranchKind kind = BranchKind::line;
  int from_bus = 0;
  int to_bus = 0;
  double r_ohm = 0.0;
  double x_ohm = 0.0;
  double b_total_us = 0.0;
  double length_km = 0.0;
  double max_i_ka = 0.0;
  double max_loading_percent = 100.0;
  int parallel = 1;
  bool in_service = true;
  bool replaceable = false;
  double repl_cost_per_km = 0.0;
  bool operator==(const Branch&) const = default;
};

enum class SwitchKind { bus_bus, bus_line };

/// `other` is a bus key for bus-bus switches and a branch key for bus-line switches.
struct Switch {
  int id = 0;
  SwitchKind kind = SwitchKind::bus_line;
  int bus = 0;
  int other = 0;
  bool closed_default = true;
  bool operator==(const Switch&) const = default;
};

enum class InjectionKind { load, generator, slack };

/// Loads consume `p_mw`/`q_mvar`. Generators inject `p_mw` and either hold
/// `vm_pu` (PV) or inject `q_mvar` (PQ). Slacks hold `vm_pu` and `va_degree`.
struct Injection {
  int id = 0;
  int bus = 0;
  InjectionKind kind = InjectionKind::load;
  std::optional<double> p_mw;
  std::optional<double> q_mvar;
  std::optional<double> vm_pu;
  std::optional<double> va_degree;
  bool operator==(const Injection&) const = default;
};

/// Partial replacement of injection setpoints; unset fields keep the default.
struct InjectionOverride {
  std::optional<double> p_mw;
  std::optional<double> q_mvar;
  std::optional<double> vm_pu;
  std::optional<double> va_degree;
  bool operator==(const InjectionOverride&) const = default;
};

/// One loading situation overlaid on a grid.
struct LoadCase {
  std::string name;
  std::map<int, bool> switch_states;
  std::set<int> outages;
  std::map<int, InjectionOverride> injection_overrides;
  bool operator==(const LoadCase&) const = default;
};

/// Immutable network description with key lookup.
///
/// The constructor does not reject inconsistent data so that `validate_grid`
/// can report every problem at once. Lookups of duplicated keys resolve to the
/// first element carrying the key.
class Grid {
 public:
  Grid() = default;

  Grid(double base_mva, std::vector<Bus> buses, std::vector<Branch> branches, std::vector<Switch> switches,
       std::vector<Injection> injections)
      : base_mva_(base_mva),
        buses_(std::move(buses)),
        branches_(std::move(branches)),
        switches_(std::move(switches)),
        injections_(std::move(injections)) {
    for (std::size_t i = 0; i < buses_.size(); ++i) bus_index_.try_emplace(buses_[i].id, i);
    for (std::size_t i = 0; i < branches_.size(); ++i) branch_index_.try_emplace(branches_[i].id, i);
    for (std::size_t i = 0; i < switches_.size(); ++i) switch_index_.try_emplace(switches_[i].id, i);
    for (std::size_t i = 0; i < injections_.size(); ++i) injection_index_.try_emplace(injections_[i].id, i);
    gates_.resize(branches_.size());
    for (std::size_t s = 0; s < switches_.size(); ++s) {
      if (switches_[s].kind != SwitchKind::bus_line) continue;
      if (auto b = branch_index(switches_[s].other)) gates_[*b].push_back(s);
    }
  }

  double base_mva() const { return base_mva_; }
  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<Switch>& switches() const { return switches_; }
  const std::vector<Injection>& injections() const { return injections_; }

  std::optional<std::size_t> bus_index(int id) const { return lookup(bus_index_, id); }
  std::optional<std::size_t> branch_index(int id) const { return lookup(branch_index_, id); }
  std::optional<std::size_t> switch_index(int id) const { return lookup(switch_index_, id); }
  std::optional<std::size_t> injection_index(int id) const { return lookup(injection_index_, id); }

  /// Bus index for a key that is known to resolve.
  std::size_t bus_at(int id) const {
    auto idx = bus_index(id);
    if (!idx) throw ResolutionError("unknown bus key " + std::to_string(id));
    return *idx;
  }

  /// Bus-line switches attached to branch `branch` (by position).
  const std::vector<std::size_t>& branch_gates(std::size_t branch) const { return gates_[branch]; }

  bool operator==(const Grid& other) const {
    return base_mva_ == other.base_mva_ && buses_ == other.buses_ && branches_ == other.branches_ &&
           switches_ == other.switches_ && injections_ == other.injections_;
  }

 private:
  static std::optional<std::size_t> lookup(const std::unordered_map<int, std::size_t>& map, int id) {
    auto it = map.find(id);
    if (it == map.end()) return std::nullopt;
    return it->second;
  }

  double base_mva_ = 100.0;
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<Switch> switches_;
  std::vector<Injection> injections_;
  std::unordered_map<int, std::size_t> bus_index_;
  std::unordered_map<int, std::size_t> branch_index_;
  std::unordered_map<int, std::size_t> switch_index_;
  std::unordered_map<int, std::size_t> injection_index_;
  std::vector<std::vector<std::size_t>> gates_;
};

struct Violation {
  std::string element;  // "bus", "branch", "switch", "injection", "grid"
  int id = 0;
  std::string reason;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline void check_fields(ValidationReport& report, const Injection& inj, bool p, bool q, bool vm, bool va,
                         const char* kind) {
  auto expect = [&](const std::optional<double>& field, bool required, const char* name) {
    if (required && !field) report.push_back({"injection", inj.id, std::string(kind) + " requires " + name});
    if (!required && field) report.push_back({"injection", inj.id, std::string(kind) + " must not set " + name});
  };
  expect(inj.p_mw, p, "p_mw");
  expect(inj.q_mvar, q, "q_mvar");
  expect(inj.vm_pu, vm, "vm_pu");
  expect(inj.va_degree, va, "va_degree");
}

}  // namespace detail

/// Lists every broken structural invariant; an empty report means the grid is valid.
inline ValidationReport validate_grid(const Grid& grid) {
  ValidationReport report;
  if (!(grid.base_mva() > 0.0)) report.push_back({"grid", 0, "base_mva must be positive"});

  std::unordered_set<int> seen;
  for (const auto& bus : grid.buses()) {
    if (!seen.insert(bus.id).second) report.push_back({"bus", bus.id, "duplicate key"});
    if (!(bus.vn_kv > 0.0)) report.push_back({"bus", bus.id, "vn_kv must be positive"});
    if (!(bus.min_vm_pu < bus.max_vm_pu)) report.push_back({"bus", bus.id, "min_vm_pu must be below max_vm_pu"});
  }

  seen.clear();
  for (const auto& br : grid.branches()) {
    if (!seen.insert(br.id).second) report.push_back({"branch", br.id, "duplicate key"});
    if (!grid.bus_index(br.from_bus))
      report.push_back({"branch", br.id, "dangling from_bus " + std::to_string(br.from_bus)});
    if (!grid.bus_index(br.to_bus)) report.push_back({"branch", br.id, "dangling to_bus " + std::to_string(br.to_bus)});
    if (br.from_bus == br.to_bus) report.push_back({"branch", br.id, "from_bus equals to_bus"});
    if (br.r_ohm == 0.0 && br.x_ohm == 0.0) report.push_back({"branch", br.id, "zero series impedance"});
    if (br.parallel < 1) report.push_back({"branch", br.id, "parallel must be at least 1"});
    if (!(br.max_loading_percent > 0.0 && br.max_loading_percent <= 200.0))
      report.push_back({"branch", br.id, "max_loading_percent outside (0, 200]"});
    if (!(br.max_i_ka > 0.0)) report.push_back({"branch", br.id, "max_i_ka must be positive"});
    if (br.length_km < 0.0) report.push_back({"branch", br.id, "negative length_km"});
    if (br.repl_cost_per_km < 0.0) report.push_back({"branch", br.id, "negative repl_cost_per_km"});
  }

  seen.clear();
  for (const auto& sw : grid.switches()) {
    if (!seen.insert(sw.id).second) report.push_back({"switch", sw.id, "duplicate key"});
    if (!grid.bus_index(sw.bus)) report.push_back({"switch", sw.id, "dangling bus " + std::to_string(sw.bus)});
    if (sw.kind == SwitchKind::bus_bus) {
      if (!grid.bus_index(sw.other))
        report.push_back({"switch", sw.id, "dangling bus " + std::to_string(sw.other)});
      else if (sw.other == sw.bus)
        report.push_back({"switch", sw.id, "bus-bus switch connects a bus to itself"});
    } else {
      auto br = grid.branch_index(sw.other);
      if (!br) {
        report.push_back({"switch", sw.id, "dangling branch " + std::to_string(sw.other)});
      } else {
        const auto& b = grid.branches()[*br];
        if (b.from_bus != sw.bus && b.to_bus != sw.bus)
          report.push_back({"switch", sw.id, "branch " + std::to_string(sw.other) + " is not incident to its bus"});
      }
    }
  }

  seen.clear();
  for (const auto& inj : grid.injections()) {
    if (!seen.insert(inj.id).second) report.push_back({"injection", inj.id, "duplicate key"});
    if (!grid.bus_index(inj.bus)) report.push_back({"injection", inj.id, "dangling bus " + std::to_string(inj.bus)});
    switch (inj.kind) {
      case InjectionKind::load:
        detail::check_fields(report, inj, true, true, false, false, "load");
        break;
      case InjectionKind::generator:
        if (!inj.p_mw) report.push_back({"injection", inj.id, "generator requires p_mw"});
        if (inj.va_degree) report.push_back({"injection", inj.id, "generator must not set va_degree"});
        if (inj.q_mvar.has_value() == inj.vm_pu.has_value())
          report.push_back({"injection", inj.id, "generator requires exactly one of q_mvar (PQ) or vm_pu (PV)"});
        break;
      case InjectionKind::slack:
        detail::check_fields(report, inj, false, false, true, true, "slack");
        break;
    }
    if (inj.vm_pu && !(*inj.vm_pu > 0.0)) report.push_back({"injection", inj.id, "vm_pu must be positive"});
  }
  return report;
}

/// Working snapshot of one grid under one load case, plus any measure overlay.
///
/// `branches` starts as a copy of the grid branches with effective service
/// state and may carry appended branches (additional lines) beyond
/// `grid->branches().size()`. The grid must outlive the state.
struct GridState {
  const Grid* grid = nullptr;
  std::vector<Branch> branches;
  std::vector<bool> switch_closed;
  std::vector<Injection> injections;

  std::size_t base_branch_count() const { return grid->branches().size(); }
  bool operator==(const GridState&) const = default;
};

inline GridState default_state(const Grid& grid) {
  GridState state;
  state.grid = &grid;
  state.branches = grid.branches();
  state.switch_closed.reserve(grid.switches().size());
  for (const auto& sw : grid.switches()) state.switch_closed.push_back(sw.closed_default);
  state.injections = grid.injections();
  return state;
}

/// Effective state of `grid` under `lc`; load-case values take precedence over defaults.
inline GridState apply_load_case(const Grid& grid, const LoadCase& lc) {
  GridState state = default_state(grid);
  for (const auto& [key, closed] : lc.switch_states) {
    auto idx = grid.switch_index(key);
    if (!idx) throw ResolutionError("load case '" + lc.name + "': unknown switch key " + std::to_string(key));
    state.switch_closed[*idx] = closed;
  }
  for (int key : lc.outages) {
    auto idx = grid.branch_index(key);
    if (!idx) throw ResolutionError("load case '" + lc.name + "': unknown outage branch key " + std::to_string(key));
    state.branches[*idx].in_service = false;
  }
  for (const auto& [key, ov] : lc.injection_overrides) {
    auto idx = grid.injection_index(key);
    if (!idx) throw ResolutionError("load case '" + lc.name + "': unknown injection key " + std::to_string(key));
    auto& inj = state.injections[*idx];
    auto set = [&](std::optional<double>& field, const std::optional<double>& value, const char* name) {
      if (!value) return;
      if (!field)
        throw ResolutionError("load case '" + lc.name + "': injection " + std::to_string(key) + " has no field " +
                              name);
      field = value;
    };
    set(inj.p_mw, ov.p_mw, "p_mw");
    set(inj.q_mvar, ov.q_mvar, "q_mvar");
    set(inj.vm_pu, ov.vm_pu, "vm_pu");
    set(inj.va_degree, ov.va_degree, "va_degree");
  }
  return state;
}

/// Uniform limit replacements applied on top of the per-element data.
struct LimitOverrides {
  std::optional<double> min_vm_pu;
  std::optional<double> max_vm_pu;
  std::optional<double> max_loading_percent;
};

inline Grid with_limits(const Grid& grid, const LimitOverrides& limits) {
  auto buses = grid.buses();
  auto branches = grid.branches();
  for (auto& b : buses) {
    if (limits.min_vm_pu) b.min_vm_pu = *limits.min_vm_pu;
    if (limits.max_vm_pu) b.max_vm_pu = *limits.max_vm_pu;
  }
  if (limits.max_loading_percent)
    for (auto& br : branches) br.max_loading_percent = *limits.max_loading_percent;
  return Grid(grid.base_mva(), std::move(buses), std::move(branches), grid.switches(), grid.injections());
}

}  // namespace gridplan
