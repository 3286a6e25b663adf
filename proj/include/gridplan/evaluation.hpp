#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/errors.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/measures.hpp"
#include "gridplan/power_flow.hpp"
#include "gridplan/topology.hpp"

namespace gridplan {

/// Restriction levels, most severe first.
namespace level {
inline constexpr int connection = 4;
inline constexpr int convergence = 3;
inline constexpr int line_loading = 2;
inline constexpr int voltage = 1;
inline constexpr int investment = 0;
}  // namespace level

/// Which kind of check decided an evaluation; used for timing attribution.
enum class EvalClass { topology = 0, powerflow = 1, cost = 2 };

inline const char* to_string(EvalClass c) {
  switch (c) {
    case EvalClass::topology:
      return "topology";
    case EvalClass::powerflow:
      return "powerflow";
    case EvalClass::cost:
      return "cost";
  }
  return "?";
}

struct LoadCaseDiagnostics {
  std::string name;
  std::size_t disconnected = 0;
  bool solved = false;
  bool converged = false;
  int iterations = 0;
  double overload = 0.0;           // sum of (loading - limit)/100 * max(length, 1 km)
  double voltage_violation = 0.0;  // sum of pu deviations outside limits
};

struct EvaluationResult {
  int level = level::connection;
  double raw_cost = 0.0;
  double normalized = 0.0;
  EvalClass eval_class = EvalClass::topology;
  double investment = 0.0;  // money, independent of the level reached
  std::vector<LoadCaseDiagnostics> per_case;
};

/// `level + tanh(raw_cost)`, kept strictly below `level + 1`.
///
/// In double precision tanh reaches 1.0 for arguments above ~19 and the sum
/// rounds up to the next level, so the result is clamped to the largest
/// double below `level + 1`.
inline double normalized_cost(int lvl, double raw_cost) {
  if (!(raw_cost >= 0.0)) throw DomainError("raw cost must be non-negative, got " + std::to_string(raw_cost));
  const double base = static_cast<double>(lvl);
  const double ceiling = std::nextafter(base + 1.0, base);
  return std::min(base + std::tanh(raw_cost), ceiling);
}

/// Orders by level first, then by raw cost within a level.
inline std::weak_ordering compare_lex(const EvaluationResult& a, const EvaluationResult& b) {
  if (a.level != b.level) return a.level <=> b.level;
  if (a.raw_cost < b.raw_cost) return std::weak_ordering::less;
  if (b.raw_cost < a.raw_cost) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

inline bool better_lex(const EvaluationResult& a, const EvaluationResult& b) { return compare_lex(a, b) < 0; }

struct EvaluationOptions {
  PfOptions pf;
  /// Multiplier from money to the investment-level raw cost (default: euro to million euro).
  double cost_scale = 1e-6;
};

/// Evaluates candidates of one catalog against all load cases of one grid.
///
/// Per load case the base state is resolved once at construction. The grid
/// and catalog are referenced and must outlive the evaluator. `evaluate` is
/// const and safe to call concurrently.
class Evaluator {
 public:
  Evaluator(const Grid& grid, std::vector<LoadCase> load_cases, const MeasureCatalog& catalog,
            EvaluationOptions opts = {})
      : grid_(&grid), catalog_(&catalog), load_cases_(std::move(load_cases)), opts_(opts) {
    if (load_cases_.empty()) load_cases_.push_back(LoadCase{"base", {}, {}, {}});
    for (const auto& lc : load_cases_) {
      base_states_.push_back(apply_load_case(grid, lc));
      references_.push_back(reference_buses(base_states_.back()));
      if (references_.back().empty())
        throw ConfigurationError("load case '" + lc.name + "' has no in-service slack injection");
    }
  }

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const Grid& grid() const { return *grid_; }
  const MeasureCatalog& catalog() const { return *catalog_; }
  const std::vector<LoadCase>& load_cases() const { return load_cases_; }
  const EvaluationOptions& options() const { return opts_; }
  std::size_t powerflow_solves() const { return pf_solves_.load(std::memory_order_relaxed); }

  /// Load-case state with the candidate's measures applied.
  GridState state_for(const Candidate& candidate, std::size_t load_case) const {
    return apply_overlay(base_states_[load_case], apply_measures(*grid_, *catalog_, candidate));
  }

  EvaluationResult evaluate(const Candidate& candidate) const {
    const MeasureOverlay overlay = apply_measures(*grid_, *catalog_, candidate);
    const std::size_t n = load_cases_.size();
    EvaluationResult result;
    result.investment = candidate_cost(*catalog_, candidate);
    result.per_case.resize(n);
    std::vector<GridState> states;
    states.reserve(n);

    std::size_t disconnected = 0;
    for (std::size_t k = 0; k < n; ++k) {
      states.push_back(apply_overlay(base_states_[k], overlay));
      result.per_case[k].name = load_cases_[k].name;
      result.per_case[k].disconnected = disconnected_count(states[k], references_[k]);
      disconnected += result.per_case[k].disconnected;
    }
    if (disconnected > 0)
      return finish(std::move(result), level::connection, static_cast<double>(disconnected), EvalClass::topology);

    std::vector<PfResult> flows;
    flows.reserve(n);
    std::size_t failed = 0;
    for (std::size_t k = 0; k < n; ++k) {
      flows.push_back(solve_power_flow(states[k], opts_.pf));
      pf_solves_.fetch_add(1, std::memory_order_relaxed);
      auto& diag = result.per_case[k];
      diag.solved = true;
      diag.converged = flows[k].converged;
      diag.iterations = flows[k].iterations;
      if (!flows[k].converged) ++failed;
    }
    if (failed > 0)
      return finish(std::move(result), level::convergence, static_cast<double>(failed), EvalClass::powerflow);

    double overload = 0.0;
    double voltage = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& st = states[k];
      const auto& pf = flows[k];
      auto& diag = result.per_case[k];
      for (std::size_t i = 0; i < st.branches.size(); ++i) {
        const auto& br = st.branches[i];
        const double excess = pf.branch_loading_percent[i] - br.max_loading_percent;
        if (excess > 0.0) diag.overload += excess / 100.0 * std::max(br.length_km, 1.0);
      }
      for (std::size_t b = 0; b < grid_->buses().size(); ++b) {
        if (!pf.energized[b]) continue;
        const auto& bus = grid_->buses()[b];
        diag.voltage_violation +=
            std::max(0.0, pf.vm_pu[b] - bus.max_vm_pu) + std::max(0.0, bus.min_vm_pu - pf.vm_pu[b]);
      }
      overload += diag.overload;
      voltage += diag.voltage_violation;
    }
    if (overload > 0.0) return finish(std::move(result), level::line_loading, overload, EvalClass::powerflow);
    if (voltage > 0.0) return finish(std::move(result), level::voltage, voltage, EvalClass::powerflow);
    const double invest = result.investment * opts_.cost_scale;
    return finish(std::move(result), level::investment, invest, EvalClass::cost);
  }

 private:
  static EvaluationResult finish(EvaluationResult r, int lvl, double raw, EvalClass cls) {
    r.level = lvl;
    r.raw_cost = raw;
    r.normalized = normalized_cost(lvl, raw);
    r.eval_class = cls;
    return r;
  }

  const Grid* grid_;
  const MeasureCatalog* catalog_;
  std::vector<LoadCase> load_cases_;
  EvaluationOptions opts_;
  std::vector<GridState> base_states_;
  std::vector<std::vector<std::size_t>> references_;
  mutable std::atomic<std::size_t> pf_solves_{0};
};

inline EvaluationResult evaluate(const Grid& grid, const std::vector<LoadCase>& load_cases,
                                 const MeasureCatalog& catalog, const Candidate& candidate,
                                 const EvaluationOptions& opts = {}) {
  return Evaluator(grid, load_cases, catalog, opts).evaluate(candidate);
}

}  // namespace gridplan
