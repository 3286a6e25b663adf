#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/delaunay.hpp"
#include "gridplan/errors.hpp"
#include "gridplan/grid.hpp"

namespace gridplan {

enum class MeasureKind { repl, toggle_switch, additional_line };

inline const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::repl:
      return "REPL";
    case MeasureKind::toggle_switch:
      return "SWITCH";
    case MeasureKind::additional_line:
      return "AL";
  }
  return "?";
}

/// Electrical and economic parameters of newly built lines, per km.
struct LineTemplate {
  double r_ohm_per_km = 0.06;
  double x_ohm_per_km = 0.4;
  double b_us_per_km = 3.0;
  double max_i_ka = 0.645;
  double max_loading_percent = 100.0;
  double cost_per_km = 1.0e6;
};

struct CatalogConfig {
  bool additional_lines = false;
  double detour_factor = 1.3;
  double switch_cost = 0.0;
  LineTemplate al_template;
};

/// One binary planning action.
///
/// `element` is the branch key (REPL) or switch key (SWITCH). Additional
/// lines carry the complete branch they would add in `line`.
struct Measure {
  std::size_t index = 0;
  MeasureKind kind = MeasureKind::repl;
  int element = 0;
  Branch line;
  double invest_cost = 0.0;
  bool operator==(const Measure&) const = default;
};

/// Ordered measures: REPL block, then SWITCH block, then AL block.
class MeasureCatalog {
 public:
  MeasureCatalog() = default;
  explicit MeasureCatalog(std::vector<Measure> measures) : measures_(std::move(measures)) {
    for (std::size_t i = 0; i < measures_.size(); ++i) measures_[i].index = i;
  }

  std::size_t size() const { return measures_.size(); }
  bool empty() const { return measures_.empty(); }
  const Measure& operator[](std::size_t i) const { return measures_[i]; }
  const std::vector<Measure>& measures() const { return measures_; }

  std::size_t count(MeasureKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(measures_.begin(), measures_.end(), [&](const Measure& m) { return m.kind == kind; }));
  }

  /// FNV-1a over the catalog content; equal catalogs hash equal.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) h = (h ^ p[i]) * 1099511628211ULL;
    };
    for (const auto& m : measures_) {
      int kind = static_cast<int>(m.kind);
      mix(&kind, sizeof kind);
      mix(&m.element, sizeof m.element);
      mix(&m.line.from_bus, sizeof(int));
      mix(&m.line.to_bus, sizeof(int));
      mix(&m.line.length_km, sizeof(double));
      mix(&m.invest_cost, sizeof(double));
    }
    return h;
  }

  bool operator==(const MeasureCatalog&) const = default;

 private:
  std::vector<Measure> measures_;
};

/// Binary decision vector over a catalog; bit i set means measure i is applied.
struct Candidate {
  std::vector<std::uint8_t> bits;

  Candidate() = default;
  explicit Candidate(std::size_t n) : bits(n, 0) {}

  std::size_t size() const { return bits.size(); }
  bool test(std::size_t i) const { return bits[i] != 0; }
  void flip(std::size_t i) { bits[i] ^= 1U; }
  void set(std::size_t i, bool value) { bits[i] = value ? 1 : 0; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

  std::string to_string() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) s[i] = '1';
    return s;
  }

  static Candidate from_string(const std::string& s) {
    Candidate c(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw ParseError("candidate string must contain only 0 and 1", i);
      c.bits[i] = s[i] == '1' ? 1 : 0;
    }
    return c;
  }

  /// Bit i carries weight 2^i. Only meaningful for catalogs of at most 64 measures.
  std::uint64_t to_integer() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i)
      if (bits[i]) v |= std::uint64_t{1} << i;
    return v;
  }

  static Candidate from_integer(std::uint64_t value, std::size_t n) {
    Candidate c(n);
    for (std::size_t i = 0; i < n && i < 64; ++i) c.bits[i] = (value >> i) & 1U;
    return c;
  }

  /// 16 hex digits of FNV-1a over the bit string.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto b : bits) h = (h ^ (b + 1U)) * 1099511628211ULL;
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    return out;
  }

  bool operator==(const Candidate&) const = default;
};

/// Additional-line measures along Delaunay edges between bus locations.
///
/// Buses sharing one coordinate form one location represented by its first
/// bus. Location pairs already joined by an in-service branch are skipped.
inline std::vector<Measure> delaunay_al_candidates(const Grid& grid, const LineTemplate& tpl,
                                                   double detour_factor = 1.3) {
  std::vector<Point2> points;
  std::vector<std::size_t> rep_bus;
  std::map<std::pair<double, double>, std::size_t> location_of;
  std::vector<std::ptrdiff_t> bus_location(grid.buses().size(), -1);
  for (std::size_t b = 0; b < grid.buses().size(); ++b) {
    const auto& bus = grid.buses()[b];
    if (!bus.in_service) continue;
    if (!bus.geo) throw GeometryError("bus " + std::to_string(bus.id) + " has no coordinates");
    auto [it, fresh] = location_of.try_emplace({bus.geo->x_km, bus.geo->y_km}, points.size());
    if (fresh) {
      points.push_back({bus.geo->x_km, bus.geo->y_km});
      rep_bus.push_back(b);
    }
    bus_location[b] = static_cast<std::ptrdiff_t>(it->second);
  }

  std::set<std::pair<std::size_t, std::size_t>> joined;
  for (const auto& br : grid.branches()) {
    if (!br.in_service) continue;
    auto f = bus_location[grid.bus_at(br.from_bus)];
    auto t = bus_location[grid.bus_at(br.to_bus)];
    if (f < 0 || t < 0) continue;
    auto a = static_cast<std::size_t>(f), b = static_cast<std::size_t>(t);
    joined.insert({std::min(a, b), std::max(a, b)});
  }

  int next_id = 0;
  for (const auto& br : grid.branches()) next_id = std::max(next_id, br.id);

  std::vector<Measure> out;
  for (auto [a, b] : delaunay_edges(points)) {
    if (joined.contains({a, b})) continue;
    const auto& pa = points[a];
    const auto& pb = points[b];
    const double length = std::hypot(pa.x - pb.x, pa.y - pb.y) * detour_factor;
    Measure m;
    m.kind = MeasureKind::additional_line;
    m.line.id = ++next_id;
    m.element = m.line.id;
    m.line.kind = BranchKind::line;
    m.line.from_bus = grid.buses()[rep_bus[a]].id;
    m.line.to_bus = grid.buses()[rep_bus[b]].id;
    m.line.length_km = length;
    m.line.r_ohm = tpl.r_ohm_per_km * length;
    m.line.x_ohm = tpl.x_ohm_per_km * length;
    m.line.b_total_us = tpl.b_us_per_km * length;
    m.line.max_i_ka = tpl.max_i_ka;
    m.line.max_loading_percent = tpl.max_loading_percent;
    m.line.repl_cost_per_km = tpl.cost_per_km;
    m.invest_cost = tpl.cost_per_km * length;
    out.push_back(m);
  }
  return out;
}

inline MeasureCatalog build_catalog(const Grid& grid, const CatalogConfig& cfg = {}) {
  std::vector<Measure> measures;
  for (const auto& br : grid.branches()) {
    if (br.kind != BranchKind::line || !br.in_service || !br.replaceable) continue;
    Measure m;
    m.kind = MeasureKind::repl;
    m.element = br.id;
    m.invest_cost = br.repl_cost_per_km * br.length_km;
    measures.push_back(m);
  }
  for (const auto& sw : grid.switches()) {
    Measure m;
    m.kind = MeasureKind::toggle_switch;
    m.element = sw.id;
    m.invest_cost = cfg.switch_cost;
    measures.push_back(m);
  }
  if (cfg.additional_lines) {
    for (const auto& bus : grid.buses())
      if (bus.in_service && !bus.geo)
        throw ConfigurationError("additional lines need coordinates for every bus; bus " + std::to_string(bus.id) +
                                 " has none");
    auto al = delaunay_al_candidates(grid, cfg.al_template, cfg.detour_factor);
    measures.insert(measures.end(), al.begin(), al.end());
  }
  return MeasureCatalog(std::move(measures));
}

/// Declarative effect of a candidate on a grid state.
struct MeasureOverlay {
  std::vector<std::size_t> doubled_branches;  // branch positions
  std::vector<std::size_t> toggled_switches;  // switch positions
  std::vector<Branch> added_branches;
  bool operator==(const MeasureOverlay&) const = default;
};

inline MeasureOverlay apply_measures(const Grid& grid, const MeasureCatalog& catalog, const Candidate& candidate) {
  if (candidate.size() != catalog.size())
    throw UsageError("candidate has " + std::to_string(candidate.size()) + " bits, catalog has " +
                     std::to_string(catalog.size()) + " measures");
  MeasureOverlay overlay;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (!candidate.test(i)) continue;
    const auto& m = catalog[i];
    switch (m.kind) {
      case MeasureKind::repl:
        overlay.doubled_branches.push_back(*grid.branch_index(m.element));
        break;
      case MeasureKind::toggle_switch:
        overlay.toggled_switches.push_back(*grid.switch_index(m.element));
        break;
      case MeasureKind::additional_line:
        overlay.added_branches.push_back(m.line);
        break;
    }
  }
  return overlay;
}

/// State with the overlay applied on top: doubled parallel count, toggled
/// switch state (relative to the state's current value), appended lines.
inline GridState apply_overlay(GridState state, const MeasureOverlay& overlay) {
  for (auto b : overlay.doubled_branches) state.branches[b].parallel *= 2;
  for (auto s : overlay.toggled_switches) state.switch_closed[s] = !state.switch_closed[s];
  state.branches.insert(state.branches.end(), overlay.added_branches.begin(), overlay.added_branches.end());
  return state;
}

/// Sum of investment costs of the applied measures.
inline double candidate_cost(const MeasureCatalog& catalog, const Candidate& candidate) {
  if (candidate.size() != catalog.size())
    throw UsageError("candidate length does not match catalog size");
  double total = 0.0;
  for (std::size_t i = 0; i < catalog.size(); ++i)
    if (candidate.test(i)) total += catalog[i].invest_cost;
  return total;
}

}  // namespace gridplan
