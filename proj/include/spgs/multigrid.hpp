#pragma once

#include <functional>
#include <vector>

#include "spgs/grid.hpp"
#include "spgs/optimizer.hpp"

namespace spgs {

/// Coarse-to-fine chain of grids on one domain, each level doubling the points per axis.
struct MultigridPlan {
  std::vector<GridSpec> levels;
  std::vector<SolverConfig> configs;  // one per level

  /// Levels from `coarse` up to `fine` (inclusive) with the same solver settings everywhere.
  static MultigridPlan between(const GridSpec& coarse, const GridSpec& fine, const SolverConfig& config);

  void validate() const;
};

struct LevelResult {
  SpinorField phi;
  EnergyBreakdown energy;
  ConvergenceRecord record;
  /// Energy of the prolongated start on this level (the previous level's answer).
  double start_energy = 0.0;
};

struct CascadeResult {
  std::vector<LevelResult> levels;  // coarse to fine

  const LevelResult& finest() const { return levels.back(); }
  bool converged() const;
  int total_iterations() const;
};

using LevelCallback = std::function<void(std::size_t level, const LevelResult&)>;

/// Cascadic multigrid: solve, prolongate, renormalize, repeat to the finest level.
CascadeResult cm_pcg_solve(const SpinorField& phi0_coarse, const PhysicsParams& params, const MultigridPlan& plan,
                           const LevelCallback& on_level = {});

}  // namespace spgs
