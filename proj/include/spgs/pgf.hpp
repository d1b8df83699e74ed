#pragma once

#include "spgs/optimizer.hpp"

namespace spgs {

struct PgfConfig {
  double dt = 0.1;
  /// Constant shift alpha treated implicitly with -1/2 Lap and explicitly
  /// subtracted from the rest. Negative selects the automatic choice
  /// 1/2 max(V + c0 rho) of the starting state.
  double shift = -1.0;
  StopCriterion stop = StopCriterion::energy_diff;
  double tol = 1e-14;
  int max_iters = 200000;

  void validate() const;
};

/// Shift used for a given state when config.shift < 0.
double pgf_auto_shift(const Hamiltonian& ham, const SpinorField& phi);

/// One backward/forward Euler step along the projected gradient H(Phi) - mu Phi,
/// followed by joint renormalization:
/// (1 + dt (alpha - 1/2 Lap)) Phi* = Phi - dt (H(Phi) - mu Phi + 1/2 Lap Phi - alpha Phi).
SpinorField pgf_step(const SpinorField& phi, const Hamiltonian& ham, double dt, double alpha);

/// Projected gradient flow iterated until the stop criterion holds.
SolveResult pgf_solve(const SpinorField& phi0, const Hamiltonian& ham, const PgfConfig& config);
SolveResult pgf_solve(const SpinorField& phi0, const PhysicsParams& params, const PgfConfig& config);

}  // namespace spgs
