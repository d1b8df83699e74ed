#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spgs/io.hpp"

namespace spgs {

/// Result of one configured solve, whatever the method.
struct RunOutcome {
  SpinorField phi;
  EnergyBreakdown energy;
  ConvergenceRecord record;               // finest level
  std::vector<ConvergenceRecord> levels;  // every level, coarse to fine (one entry unless cm_pcg)
  bool converged = false;
  int iterations = 0;                     // summed over levels
  double seconds = 0.0;
};

RunOutcome run_solve(const RunConfig& config, const GuessTriple& guess);

struct Diagnostics {
  EnergyBreakdown energy;
  double residual_inf = 0.0;
  std::optional<double> virial;  // harmonic traps only
  ExistenceReport existence;
};

Diagnostics diagnose(const SpinorField& phi, const PhysicsParams& params);

struct StudyRow {
  int points = 0;
  double h = 0.0;
  double wavefn_error = 0.0;  // E_h
  double energy_error = 0.0;
  double mu_error = 0.0;
  double virial = 0.0;        // I_h
  int iterations = 0;
  bool converged = false;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  SpinorField reference;
  EnergyBreakdown reference_energy;
};

/// Cascade from study_points[0] through reference_points; every level is
/// compared with the finest one (or with `reference` when supplied, in which
/// case the cascade stops at the last study level).
StudyResult convergence_study(const RunConfig& config, const GuessTriple& guess,
                              const SpinorField* reference = nullptr);

/// Samples a field at the nodes of a nested coarser grid (same domain,
/// points divide evenly).
SpinorField restrict_to(const SpinorField& fine, const GridSpec& coarse);

/// Phase-aligned relative sup-norm error on the nodes of the coarse grid.
double wavefn_error(const SpinorField& coarse, const SpinorField& reference);

struct CompareResult {
  RunOutcome pcg;
  RunOutcome pgf;
  double reference_energy = 0.0;  // lower of the two final energies
};

/// PCG and PGF on the fine grid from the same initial state.
CompareResult compare_methods(const RunConfig& config, const GuessTriple& guess);
std::string compare_csv(const CompareResult& r);

}  // namespace spgs
