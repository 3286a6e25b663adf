#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "gridplan/gridplan.hpp"

namespace support {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(GRIDPLAN_DATA_DIR) / name;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gridplan-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) { return gridplan::read_text_file(p); }

inline gridplan::Bus bus(int id, double vn_kv = 20.0) {
  gridplan::Bus b;
  b.id = id;
  b.vn_kv = vn_kv;
  b.min_vm_pu = 0.9;
  b.max_vm_pu = 1.1;
  return b;
}

inline gridplan::Branch line(int id, int from, int to, double r_ohm, double x_ohm, double max_i_ka = 0.4) {
  gridplan::Branch br;
  br.id = id;
  br.from_bus = from;
  br.to_bus = to;
  br.r_ohm = r_ohm;
  br.x_ohm = x_ohm;
  br.length_km = 1.0;
  br.max_i_ka = max_i_ka;
  return br;
}

inline gridplan::Injection slack(int id, int bus, double vm = 1.0) {
  gridplan::Injection i;
  i.id = id;
  i.bus = bus;
  i.kind = gridplan::InjectionKind::slack;
  i.vm_pu = vm;
  i.va_degree = 0.0;
  return i;
}

inline gridplan::Injection load(int id, int bus, double p, double q) {
  gridplan::Injection i;
  i.id = id;
  i.bus = bus;
  i.kind = gridplan::InjectionKind::load;
  i.p_mw = p;
  i.q_mvar = q;
  return i;
}

inline gridplan::Switch gate(int id, int bus, int branch, bool closed) {
  gridplan::Switch s;
  s.id = id;
  s.kind = gridplan::SwitchKind::bus_line;
  s.bus = bus;
  s.other = branch;
  s.closed_default = closed;
  return s;
}

inline gridplan::ProblemSpec desk14_spec(double switch_cost = 10000.0) {
  gridplan::ProblemSpec spec;
  spec.name = "desk14";
  spec.grid = data_path("desk14.grid.json");
  spec.load_cases = data_path("desk14.cases.json");
  spec.catalog.switch_cost = switch_cost;
  return spec;
}

inline gridplan::ProblemSpec feeder120_spec(double switch_cost = 10000.0) {
  gridplan::ProblemSpec spec;
  spec.name = "feeder120";
  spec.grid = data_path("feeder120.grid.json");
  spec.load_cases = data_path("feeder120.cases.json");
  spec.catalog.switch_cost = switch_cost;
  return spec;
}

}  // namespace support
