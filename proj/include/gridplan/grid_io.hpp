#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/json_reader.hpp"

namespace gridplan {

inline constexpr const char* grid_format = "gridplan-grid";
inline constexpr const char* cases_format = "gridplan-cases";

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << text;
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path.string() + ": " + ec.message());
}

namespace detail {

inline BranchKind parse_branch_kind(const std::string& s, const std::string& where) {
  if (s == "line") return BranchKind::line;
  if (s == "transformer") return BranchKind::transformer;
  throw ParseError(where + ": unknown branch kind '" + s + "'");
}

inline SwitchKind parse_switch_kind(const std::string& s, const std::string& where) {
  if (s == "bus-bus") return SwitchKind::bus_bus;
  if (s == "bus-line") return SwitchKind::bus_line;
  throw ParseError(where + ": unknown switch kind '" + s + "'");
}

inline InjectionKind parse_injection_kind(const std::string& s, const std::string& where) {
  if (s == "load") return InjectionKind::load;
  if (s == "generator") return InjectionKind::generator;
  if (s == "slack") return InjectionKind::slack;
  throw ParseError(where + ": unknown injection kind '" + s + "'");
}

inline const char* kind_name(BranchKind k) { return k == BranchKind::line ? "line" : "transformer"; }
inline const char* kind_name(SwitchKind k) { return k == SwitchKind::bus_bus ? "bus-bus" : "bus-line"; }
inline const char* kind_name(InjectionKind k) {
  switch (k) {
    case InjectionKind::load:
      return "load";
    case InjectionKind::generator:
      return "generator";
    case InjectionKind::slack:
      return "slack";
  }
  return "?";
}

template <class F>
void for_each_entry(ObjectReader& root, const std::string& key, F&& fn) {
  const Json* arr = root.child(key);
  if (!arr) return;
  if (!arr->is_array()) throw ParseError(root.child_path(key) + ": expected an array");
  for (std::size_t i = 0; i < arr->size(); ++i) {
    ObjectReader r((*arr)[i], root.child_path(key) + "[" + std::to_string(i) + "]");
    fn(r);
    r.finish();
  }
}

inline void put_optional(Json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace detail

/// Grid from a parsed document; the result is not validated.
inline Grid grid_from_json(const Json& doc, const std::string& origin = "grid") {
  ObjectReader root(doc, origin);
  expect_format(root, grid_format, 1);
  const double base_mva = root.value<double>("base_mva", 100.0);

  std::vector<Bus> buses;
  detail::for_each_entry(root, "buses", [&](ObjectReader& r) {
    Bus b;
    b.id = r.required<int>("id");
    b.name = r.value<std::string>("name", "");
    b.vn_kv = r.required<double>("vn_kv");
    b.min_vm_pu = r.value<double>("min_vm_pu", b.min_vm_pu);
    b.max_vm_pu = r.value<double>("max_vm_pu", b.max_vm_pu);
    if (const Json* g = r.child("geo")) {
      ObjectReader gr(*g, r.child_path("geo"));
      b.geo = GeoPoint{gr.required<double>("x_km"), gr.required<double>("y_km")};
      gr.finish();
    }
    b.in_service = r.value<bool>("in_service", true);
    buses.push_back(std::move(b));
  });

  std::vector<Branch> branches;
  detail::for_each_entry(root, "branches", [&](ObjectReader& r) {
    Branch br;
    br.id = r.required<int>("id");
    br.kind = detail::parse_branch_kind(r.value<std::string>("kind", "line"), r.path());
    br.from_bus = r.required<int>("from_bus");
    br.to_bus = r.required<int>("to_bus");
    br.r_ohm = r.required<double>("r_ohm");
    br.x_ohm = r.required<double>("x_ohm");
    br.b_total_us = r.value<double>("b_total_us", 0.0);
    br.length_km = r.value<double>("length_km", 0.0);
    br.max_i_ka = r.required<double>("max_i_ka");
    br.max_loading_percent = r.value<double>("max_loading_percent", 100.0);
    br.parallel = r.value<int>("parallel", 1);
    br.in_service = r.value<bool>("in_service", true);
    br.replaceable = r.value<bool>("replaceable", false);
    br.repl_cost_per_km = r.value<double>("repl_cost_per_km", 0.0);
    branches.push_back(br);
  });

  std::vector<Switch> switches;
  detail::for_each_entry(root, "switches", [&](ObjectReader& r) {
    Switch sw;
    sw.id = r.required<int>("id");
    sw.kind = detail::parse_switch_kind(r.required<std::string>("kind"), r.path());
    sw.bus = r.required<int>("bus");
    sw.other = r.required<int>("other");
    sw.closed_default = r.value<bool>("closed_default", true);
    switches.push_back(sw);
  });

  std::vector<Injection> injections;
  detail::for_each_entry(root, "injections", [&](ObjectReader& r) {
    Injection inj;
    inj.id = r.required<int>("id");
    inj.bus = r.required<int>("bus");
    inj.kind = detail::parse_injection_kind(r.required<std::string>("kind"), r.path());
    inj.p_mw = r.optional<double>("p_mw");
    inj.q_mvar = r.optional<double>("q_mvar");
    inj.vm_pu = r.optional<double>("vm_pu");
    inj.va_degree = r.optional<double>("va_degree");
    injections.push_back(inj);
  });
  root.finish();
  return Grid(base_mva, std::move(buses), std::move(branches), std::move(switches), std::move(injections));
}

inline Json grid_to_json(const Grid& grid) {
  Json doc;
  doc["format"] = grid_format;
  doc["version"] = 1;
  doc["base_mva"] = grid.base_mva();
  Json buses = Json::array();
  for (const auto& b : grid.buses()) {
    Json j{{"id", b.id},
           {"name", b.name},
           {"vn_kv", b.vn_kv},
           {"min_vm_pu", b.min_vm_pu},
           {"max_vm_pu", b.max_vm_pu},
           {"in_service", b.in_service}};
    if (b.geo) j["geo"] = {{"x_km", b.geo->x_km}, {"y_km", b.geo->y_km}};
    buses.push_back(std::move(j));
  }
  doc["buses"] = std::move(buses);
  Json branches = Json::array();
  for (const auto& br : grid.branches())
    branches.push_back({{"id", br.id},
                        {"kind", detail::kind_name(br.kind)},
                        {"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"r_ohm", br.r_ohm},
                        {"x_ohm", br.x_ohm},
                        {"b_total_us", br.b_total_us},
                        {"length_km", br.length_km},
                        {"max_i_ka", br.max_i_ka},
                        {"max_loading_percent", br.max_loading_percent},
                        {"parallel", br.parallel},
                        {"in_service", br.in_service},
                        {"replaceable", br.replaceable},
                        {"repl_cost_per_km", br.repl_cost_per_km}});
  doc["branches"] = std::move(branches);
  Json switches = Json::array();
  for (const auto& sw : grid.switches())
    switches.push_back({{"id", sw.id},
                        {"kind", detail::kind_name(sw.kind)},
                        {"bus", sw.bus},
                        {"other", sw.other},
                        {"closed_default", sw.closed_default}});
  doc["switches"] = std::move(switches);
  Json injections = Json::array();
  for (const auto& inj : grid.injections()) {
    Json j{{"id", inj.id}, {"bus", inj.bus}, {"kind", detail::kind_name(inj.kind)}};
    detail::put_optional(j, "p_mw", inj.p_mw);
    detail::put_optional(j, "q_mvar", inj.q_mvar);
    detail::put_optional(j, "vm_pu", inj.vm_pu);
    detail::put_optional(j, "va_degree", inj.va_degree);
    injections.push_back(std::move(j));
  }
  doc["injections"] = std::move(injections);
  return doc;
}

inline std::string format_report(const ValidationReport& report) {
  std::string out;
  for (const auto& v : report) out += v.element + " " + std::to_string(v.id) + ": " + v.reason + "\n";
  return out;
}

/// Parses and validates a grid file. Throws ParseError (with byte offset for
/// malformed JSON) or ValidationError listing every violation.
inline Grid load_grid(const std::filesystem::path& path) {
  Grid grid = grid_from_json(parse_json_text(read_text_file(path), path.string()), path.string());
  auto report = validate_grid(grid);
  if (!report.empty()) throw ValidationError(path.string() + ": invalid grid\n" + format_report(report));
  return grid;
}

inline void save_grid(const Grid& grid, const std::filesystem::path& path) {
  write_text_file(path, grid_to_json(grid).dump(1) + "\n");
}

inline std::vector<LoadCase> load_cases_from_json(const Json& doc, const std::string& origin = "cases") {
  ObjectReader root(doc, origin);
  expect_format(root, cases_format, 1);
  std::vector<LoadCase> out;
  detail::for_each_entry(root, "load_cases", [&](ObjectReader& r) {
    LoadCase lc;
    lc.name = r.required<std::string>("name");
    detail::for_each_entry(r, "switch_states", [&](ObjectReader& s) {
      lc.switch_states[s.required<int>("switch")] = s.required<bool>("closed");
    });
    for (int id : r.value<std::vector<int>>("outages", {})) lc.outages.insert(id);
    detail::for_each_entry(r, "injection_overrides", [&](ObjectReader& o) {
      InjectionOverride ov;
      int id = o.required<int>("injection");
      ov.p_mw = o.optional<double>("p_mw");
      ov.q_mvar = o.optional<double>("q_mvar");
      ov.vm_pu = o.optional<double>("vm_pu");
      ov.va_degree = o.optional<double>("va_degree");
      lc.injection_overrides[id] = ov;
    });
    out.push_back(std::move(lc));
  });
  root.finish();
  return out;
}

inline Json load_cases_to_json(const std::vector<LoadCase>& cases) {
  Json doc{{"format", cases_format}, {"version", 1}};
  Json arr = Json::array();
  for (const auto& lc : cases) {
    Json j{{"name", lc.name}};
    Json sw = Json::array();
    for (const auto& [id, closed] : lc.switch_states) sw.push_back({{"switch", id}, {"closed", closed}});
    j["switch_states"] = std::move(sw);
    j["outages"] = std::vector<int>(lc.outages.begin(), lc.outages.end());
    Json ov = Json::array();
    for (const auto& [id, o] : lc.injection_overrides) {
      Json e{{"injection", id}};
      detail::put_optional(e, "p_mw", o.p_mw);
      detail::put_optional(e, "q_mvar", o.q_mvar);
      detail::put_optional(e, "vm_pu", o.vm_pu);
      detail::put_optional(e, "va_degree", o.va_degree);
      ov.push_back(std::move(e));
    }
    j["injection_overrides"] = std::move(ov);
    arr.push_back(std::move(j));
  }
  doc["load_cases"] = std::move(arr);
  return doc;
}

inline std::vector<LoadCase> load_load_cases(const std::filesystem::path& path) {
  return load_cases_from_json(parse_json_text(read_text_file(path), path.string()), path.string());
}

}  // namespace gridplan
