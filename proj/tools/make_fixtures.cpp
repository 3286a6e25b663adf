// Regenerates the bundled grids in data/.
//
//   make_fixtures <out_dir>

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "gridplan/grid_io.hpp"

using namespace gridplan;

namespace {

// 150 mm² aluminium XLPE cable, values per km.
constexpr double cable_r = 0.206;
constexpr double cable_x = 0.122;
constexpr double cable_b = 78.5;
constexpr double cable_i = 0.319;
constexpr double cable_cost = 150e3;

struct Builder {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Switch> switches;
  std::vector<Injection> injections;

  void bus(int id, double x, double y) {
    Bus b;
    b.id = id;
    b.name = "B" + std::to_string(id);
    b.vn_kv = 20.0;
    b.min_vm_pu = 0.95;
    b.max_vm_pu = 1.05;
    b.geo = GeoPoint{x, y};
    buses.push_back(b);
  }

  int line(int from, int to, double km, bool replaceable = false) {
    Branch br;
    br.id = static_cast<int>(branches.size());
    br.from_bus = from;
    br.to_bus = to;
    br.r_ohm = cable_r * km;
    br.x_ohm = cable_x * km;
    br.b_total_us = cable_b * km;
    br.length_km = km;
    br.max_i_ka = cable_i;
    br.replaceable = replaceable;
    br.repl_cost_per_km = replaceable ? cable_cost : 0.0;
    branches.push_back(br);
    return br.id;
  }

  void gate(int branch, bool closed) {
    Switch sw;
    sw.id = static_cast<int>(switches.size());
    sw.kind = SwitchKind::bus_line;
    sw.bus = branches[static_cast<std::size_t>(branch)].from_bus;
    sw.other = branch;
    sw.closed_default = closed;
    switches.push_back(sw);
  }

  void load(int bus, double p_mw) {
    Injection inj;
    inj.id = static_cast<int>(injections.size());
    inj.bus = bus;
    inj.kind = InjectionKind::load;
    inj.p_mw = p_mw;
    inj.q_mvar = p_mw * 0.33;  // cos phi 0.95
    injections.push_back(inj);
  }

  int generator(int bus, double p_mw) {
    Injection inj;
    inj.id = static_cast<int>(injections.size());
    inj.bus = bus;
    inj.kind = InjectionKind::generator;
    inj.p_mw = p_mw;
    inj.q_mvar = 0.0;
    injections.push_back(inj);
    return inj.id;
  }

  void slack(int bus, double vm) {
    Injection inj;
    inj.id = static_cast<int>(injections.size());
    inj.bus = bus;
    inj.kind = InjectionKind::slack;
    inj.vm_pu = vm;
    inj.va_degree = 0.0;
    injections.push_back(inj);
  }

  Grid grid() const { return Grid(100.0, buses, branches, switches, injections); }
};

// 14 buses, three feeders from one substation and three normally open ties.
void desk14(const std::string& dir) {
  Builder b;
  b.bus(0, 0.0, 0.0);
  const double ax[] = {2.0, 3.5, 5.0, 6.2, 7.2};
  for (int i = 0; i < 5; ++i) b.bus(1 + i, ax[i], 1.0);
  const double bx[] = {2.5, 4.0, 5.5, 6.7};
  for (int i = 0; i < 4; ++i) b.bus(6 + i, bx[i], -0.5);
  const double cx[] = {2.0, 3.5, 5.0, 6.3};
  for (int i = 0; i < 4; ++i) b.bus(10 + i, cx[i], -2.5);

  b.line(0, 1, 2.0, true);
  b.line(1, 2, 1.5, true);
  b.line(2, 3, 1.5, true);
  const int a34 = b.line(3, 4, 1.2);
  b.line(4, 5, 1.0);
  b.line(0, 6, 2.5, true);
  b.line(6, 7, 1.5, true);
  const int b78 = b.line(7, 8, 1.5);
  b.line(8, 9, 1.2);
  b.line(0, 10, 2.0);
  b.line(10, 11, 1.5, true);
  const int c1112 = b.line(11, 12, 1.5);
  b.line(12, 13, 1.3);
  // Ties join a feeder end to the head of the next feeder. They are emergency
  // links with a low rating; the voltage difference drives a loop current that
  // overloads them whenever one is closed.
  const int t510 = b.line(5, 10, 6.3);
  const int t91 = b.line(9, 1, 4.9);
  const int t136 = b.line(13, 6, 4.6);
  for (int t : {t510, t91, t136}) b.branches[static_cast<std::size_t>(t)].max_i_ka = 0.03;

  b.gate(a34, true);
  b.gate(b78, true);
  b.gate(c1112, true);
  b.gate(t510, false);
  b.gate(t91, false);
  b.gate(t136, false);

  b.slack(0, 1.02);
  const double la[] = {3.0, 2.0, 2.5, 2.5, 2.5};
  for (int i = 0; i < 5; ++i) b.load(1 + i, la[i]);
  const double lb[] = {2.5, 2.5, 3.0, 3.0};
  for (int i = 0; i < 4; ++i) b.load(6 + i, lb[i]);
  const double lc[] = {2.5, 2.5, 2.5, 3.0};
  for (int i = 0; i < 4; ++i) b.load(10 + i, lc[i]);
  const int pv = b.generator(13, 0.0);

  Grid grid = b.grid();
  save_grid(grid, dir + "/desk14.grid.json");

  LoadCase peak{"peak", {}, {}, {}};
  LoadCase sunny{"sunny", {}, {}, {}};
  for (const auto& inj : grid.injections())
    if (inj.kind == InjectionKind::load) sunny.injection_overrides[inj.id] = {*inj.p_mw * 0.6, *inj.q_mvar * 0.6, {}, {}};
  sunny.injection_overrides[pv] = {3.0, {}, {}, {}};
  write_text_file(dir + "/desk14.cases.json", load_cases_to_json({peak, sunny}).dump(1) + "\n");
}

// 121 buses: eight feeders of 15 buses meshed by normally closed cross-ties
// between neighbouring feeders. Ties and some feeder segments carry switches.
void feeder120(const std::string& dir) {
  constexpr int feeders = 8;
  constexpr int per = 15;
  constexpr double pi = 3.14159265358979323846;
  Builder b;
  b.bus(0, 0.0, 0.0);
  auto id = [](int f, int k) { return 1 + f * per + k; };
  for (int f = 0; f < feeders; ++f) {
    const double ang = 2.0 * pi * f / feeders;
    for (int k = 0; k < per; ++k) {
      const double r = 1.0 + 0.5 * k;
      b.bus(id(f, k), r * std::cos(ang), r * std::sin(ang));
    }
  }
  for (int f = 0; f < feeders; ++f) {
    for (int k = 0; k < per; ++k) {
      const int from = k == 0 ? 0 : id(f, k - 1);
      const bool repl = k == 0 || (k == 1 && f % 2 == 0);
      const int br = b.line(from, id(f, k), k == 0 ? 1.0 : 0.5, repl);
      if (k == 3 || k == 8 || k == 12) b.gate(br, true);
    }
  }
  for (int f = 0; f < feeders; ++f) {
    const int g = (f + 1) % feeders;
    for (int k : {4, 9, 14}) b.gate(b.line(id(f, k), id(g, k), 0.6 + 0.4 * k), true);
  }

  b.slack(0, 1.03);
  for (int f = 0; f < feeders; ++f)
    for (int k = 0; k < per; ++k) b.load(id(f, k), (f % 2 == 0 ? 1.15 : 0.55) + 0.02 * (k % 3));

  Grid grid = b.grid();
  save_grid(grid, dir + "/feeder120.grid.json");

  LoadCase peak{"peak", {}, {}, {}};
  LoadCase light{"light", {}, {}, {}};
  for (const auto& inj : grid.injections())
    if (inj.kind == InjectionKind::load) light.injection_overrides[inj.id] = {*inj.p_mw * 0.5, *inj.q_mvar * 0.5, {}, {}};
  write_text_file(dir + "/feeder120.cases.json", load_cases_to_json({peak, light}).dump(1) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out_dir>\n";
    return 1;
  }
  desk14(argv[1]);
  feeder120(argv[1]);
  return 0;
}
