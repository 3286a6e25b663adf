#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gridplan/evaluation.hpp"
#include "gridplan/grid.hpp"
#include "gridplan/measures.hpp"

namespace gridplan {

/// Owns everything a search needs: grid, load cases, catalog and the evaluator
/// bound to them. Movable; the evaluator keeps pointing at the owned data.
class Problem {
 public:
  Problem(std::string name, Grid grid, std::vector<LoadCase> load_cases, const CatalogConfig& catalog_cfg,
          EvaluationOptions opts = {})
      : name_(std::move(name)), grid_(std::make_unique<Grid>(std::move(grid))) {
    catalog_ = std::make_unique<MeasureCatalog>(build_catalog(*grid_, catalog_cfg));
    evaluator_ = std::make_unique<Evaluator>(*grid_, std::move(load_cases), *catalog_, opts);
  }

  Problem(std::string name, Grid grid, std::vector<LoadCase> load_cases, MeasureCatalog catalog,
          EvaluationOptions opts = {})
      : name_(std::move(name)),
        grid_(std::make_unique<Grid>(std::move(grid))),
        catalog_(std::make_unique<MeasureCatalog>(std::move(catalog))) {
    evaluator_ = std::make_unique<Evaluator>(*grid_, std::move(load_cases), *catalog_, opts);
  }

  const std::string& name() const { return name_; }
  const Grid& grid() const { return *grid_; }
  const MeasureCatalog& catalog() const { return *catalog_; }
  const std::vector<LoadCase>& load_cases() const { return evaluator_->load_cases(); }
  const Evaluator& evaluator() const { return *evaluator_; }

  /// Explicit starting candidates; when empty the heuristics generate their own.
  std::vector<Candidate> initial_candidates;

 private:
  std::string name_;
  std::unique_ptr<Grid> grid_;
  std::unique_ptr<MeasureCatalog> catalog_;
  std::unique_ptr<Evaluator> evaluator_;
};

}  // namespace gridplan
