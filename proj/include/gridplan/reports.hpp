#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid_io.hpp"
#include "gridplan/heuristics/search.hpp"

namespace gridplan {

enum class CheckpointAxis { time, evals };

inline const char* to_string(CheckpointAxis a) { return a == CheckpointAxis::time ? "time" : "evals"; }

/// Normalized costs above this multiple of the global best are flagged.
inline constexpr double clip_factor = 5.0;
/// Relative tolerance under which two investments count as the same best.
inline constexpr double best_tolerance = 1e-9;

struct RunSummary {
  std::string problem;
  std::string algorithm;
  std::size_t run = 0;  // position within its (problem, algorithm) cell
  std::uint64_t seed = 0;
  std::string status;
  std::optional<int> level;
  std::optional<double> investment;  // level-0 raw cost, if reached
  std::optional<double> ratio;       // investment / global best
  std::optional<double> normalized;  // ratio clamped to [1, clip_factor]
  bool clipped = false;
  std::optional<std::size_t> evals_to_best;
  std::optional<double> time_to_best_s;
  std::array<std::size_t, 3> class_counts{};
  std::optional<std::array<double, 3>> class_shares;
  std::string share_basis;  // "time" or "evals"
};

struct CheckpointCount {
  double checkpoint = 0.0;
  std::string algorithm;
  std::size_t runs = 0;
  std::size_t runs_at_best = 0;
  std::size_t grids = 0;
  std::size_t grids_at_best = 0;
};

struct SummaryTables {
  CheckpointAxis axis = CheckpointAxis::time;
  std::vector<std::string> problems;                     // first-appearance order
  std::map<std::string, std::optional<double>> global_best;  // nullopt: no level-0 run
  std::vector<RunSummary> runs;
  std::vector<CheckpointCount> checkpoints;
};

namespace detail {

inline bool at_best(double investment, double best) { return investment <= best + best_tolerance * std::abs(best); }

/// Best-so-far trajectory point no later than `limit` on the given axis.
inline const TrajectoryPoint* best_until(const RunRecord& r, CheckpointAxis axis, double limit) {
  const TrajectoryPoint* out = nullptr;
  for (const auto& p : r.trajectory) {
    const double x = axis == CheckpointAxis::time ? p.elapsed_s : static_cast<double>(p.eval_count);
    if (x > limit) break;
    out = &p;
  }
  return out;
}

template <class T>
std::vector<std::string> ordered_unique(const std::vector<RunRecord>& records, T field) {
  std::vector<std::string> out;
  for (const auto& r : records)
    if (std::find(out.begin(), out.end(), field(r)) == out.end()) out.push_back(field(r));
  return out;
}

}  // namespace detail

/// Aggregates run records into the report tables.
///
/// The global best of a grid is the lowest level-0 investment over all of its
/// records. Each run's best is divided by it; the result is floored at 1 and
/// values above `clip_factor` are flagged clipped. Checkpoint counts use the
/// best-so-far of each run at each checkpoint.
inline SummaryTables summarize(const std::vector<RunRecord>& records, const std::vector<double>& checkpoints,
                               CheckpointAxis axis = CheckpointAxis::time) {
  SummaryTables t;
  t.axis = axis;
  t.problems = detail::ordered_unique(records, [](const RunRecord& r) { return r.problem; });
  const auto algorithms = detail::ordered_unique(records, [](const RunRecord& r) { return r.algorithm; });

  for (const auto& p : t.problems) t.global_best[p] = std::nullopt;
  for (const auto& r : records) {
    if (!r.best || r.best->level != level::investment) continue;
    auto& g = t.global_best[r.problem];
    if (!g || r.best->raw_cost < *g) g = r.best->raw_cost;
  }

  std::map<std::pair<std::string, std::string>, std::size_t> run_index;
  for (const auto& r : records) {
    RunSummary s;
    s.problem = r.problem;
    s.algorithm = r.algorithm;
    s.run = run_index[{r.problem, r.algorithm}]++;
    s.seed = r.seed;
    s.status = r.status;
    if (r.best) s.level = r.best->level;
    if (r.best && r.best->level == level::investment) {
      s.investment = r.best->raw_cost;
      const double g = *t.global_best[r.problem];
      double ratio;
      if (g > 0.0)
        ratio = r.best->raw_cost / g;
      else
        ratio = r.best->raw_cost > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
      s.ratio = ratio;
      s.clipped = ratio > clip_factor;
      s.normalized = std::clamp(ratio, 1.0, clip_factor);
    }
    if (!r.trajectory.empty()) {
      s.evals_to_best = r.trajectory.back().eval_count;
      if (r.elapsed_s > 0.0) s.time_to_best_s = r.trajectory.back().elapsed_s;
    }
    double total_s = 0.0;
    std::size_t total_n = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      s.class_counts[c] = r.by_class[c].count;
      total_n += r.by_class[c].count;
      total_s += r.by_class[c].seconds;
    }
    if (total_n > 0) {
      std::array<double, 3> shares{};
      s.share_basis = total_s > 0.0 ? "time" : "evals";
      for (std::size_t c = 0; c < 3; ++c)
        shares[c] = total_s > 0.0 ? r.by_class[c].seconds / total_s
                                  : static_cast<double>(r.by_class[c].count) / static_cast<double>(total_n);
      s.class_shares = shares;
    }
    t.runs.push_back(std::move(s));
  }

  for (double cp : checkpoints) {
    for (const auto& algo : algorithms) {
      CheckpointCount c;
      c.checkpoint = cp;
      c.algorithm = algo;
      std::map<std::string, bool> grid_hit;
      for (const auto& r : records) {
        if (r.algorithm != algo) continue;
        ++c.runs;
        grid_hit.try_emplace(r.problem, false);
        const auto& g = t.global_best[r.problem];
        const TrajectoryPoint* p = detail::best_until(r, axis, cp);
        if (g && p && p->level == level::investment && detail::at_best(p->raw_cost, *g)) {
          ++c.runs_at_best;
          grid_hit[r.problem] = true;
        }
      }
      c.grids = grid_hit.size();
      for (const auto& [_, hit] : grid_hit) c.grids_at_best += hit ? 1 : 0;
      t.checkpoints.push_back(c);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Delimited text output

/// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw UsageError("csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += escape(cells[i]);
    }
    text_ += '\n';
  }

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const { write_text_file(path, text_); }

 private:
  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }

  std::size_t columns_;
  std::string text_;
};

namespace detail {

inline std::string cell(double v) { return format_number(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
template <class T>
std::string cell(const std::optional<T>& v) {
  return v ? cell(*v) : std::string();
}

inline std::string file_stem(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out;
}

}  // namespace detail

inline const std::vector<std::string> trajectory_header{"run",   "seed",       "eval_count", "elapsed_s",
                                                        "level", "raw_cost",   "normalized", "candidate_hash"};
inline const std::vector<std::string> normalized_header{
    "problem",  "algorithm", "run",        "seed",    "status",        "level",         "investment",
    "global_best", "ratio",  "normalized", "clipped", "evals_to_best", "time_to_best_s"};
inline const std::vector<std::string> checkpoint_header{"axis",  "checkpoint", "algorithm", "runs",
                                                        "runs_at_best", "run_share", "grids", "grids_at_best"};
inline const std::vector<std::string> shares_header{
    "problem",        "algorithm",      "run",        "seed",           "basis",          "topology_evals",
    "powerflow_evals", "cost_evals",    "topology_share", "powerflow_share", "cost_share"};

/// Writes one trajectory file per (problem, algorithm) cell plus the three
/// aggregate tables into `out_dir`. Output depends only on the inputs.
inline void emit_reports(const SummaryTables& t, const std::vector<RunRecord>& records,
                         const std::filesystem::path& out_dir) {
  try {
    std::filesystem::create_directories(out_dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError("cannot create report directory " + out_dir.string() + ": " + e.what());
  }

  std::map<std::pair<std::string, std::string>, CsvWriter> cells;
  std::vector<std::pair<std::string, std::string>> cell_order;
  std::map<std::pair<std::string, std::string>, std::size_t> run_index;
  for (const auto& r : records) {
    std::pair key{r.problem, r.algorithm};
    if (!cells.contains(key)) {
      cells.emplace(key, CsvWriter(trajectory_header));
      cell_order.push_back(key);
    }
    const std::size_t run = run_index[key]++;
    auto& w = cells.at(key);
    const bool timed = r.elapsed_s > 0.0;
    for (const auto& p : r.trajectory)
      w.row({std::to_string(run), std::to_string(r.seed), std::to_string(p.eval_count),
             timed ? detail::cell(p.elapsed_s) : std::string(),
             std::to_string(p.level), detail::cell(p.raw_cost), detail::cell(p.normalized), p.candidate_hash});
  }
  for (const auto& key : cell_order)
    cells.at(key).save(out_dir / "trajectories" /
                       (detail::file_stem(key.first) + "__" + detail::file_stem(key.second) + ".csv"));

  CsvWriter norm(normalized_header);
  for (const auto& s : t.runs) {
    const auto& g = t.global_best.at(s.problem);
    norm.row({s.problem, s.algorithm, std::to_string(s.run), std::to_string(s.seed), s.status,
              s.level ? std::to_string(*s.level) : "", detail::cell(s.investment), g ? detail::cell(*g) : "infeasible",
              detail::cell(s.ratio), detail::cell(s.normalized), s.clipped ? "1" : "0", detail::cell(s.evals_to_best),
              detail::cell(s.time_to_best_s)});
  }
  norm.save(out_dir / "normalized_costs.csv");

  CsvWriter cps(checkpoint_header);
  for (const auto& c : t.checkpoints) {
    const double share = c.runs ? static_cast<double>(c.runs_at_best) / static_cast<double>(c.runs) : 0.0;
    cps.row({to_string(t.axis), detail::cell(c.checkpoint), c.algorithm, std::to_string(c.runs),
             std::to_string(c.runs_at_best), detail::cell(share), std::to_string(c.grids),
             std::to_string(c.grids_at_best)});
  }
  cps.save(out_dir / "checkpoint_best_counts.csv");

  CsvWriter shares(shares_header);
  for (const auto& s : t.runs) {
    std::vector<std::string> row{s.problem,
                                 s.algorithm,
                                 std::to_string(s.run),
                                 std::to_string(s.seed),
                                 s.share_basis,
                                 std::to_string(s.class_counts[0]),
                                 std::to_string(s.class_counts[1]),
                                 std::to_string(s.class_counts[2])};
    for (std::size_t c = 0; c < 3; ++c) row.push_back(s.class_shares ? detail::cell((*s.class_shares)[c]) : "");
    shares.row(row);
  }
  shares.save(out_dir / "eval_class_shares.csv");
}

}  // namespace gridplan
