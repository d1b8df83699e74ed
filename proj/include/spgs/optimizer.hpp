#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spgs/field.hpp"
#include "spgs/physics.hpp"

namespace spgs {

enum class Preconditioner { kinetic, potential, combined, none };
enum class StopCriterion { wavefn_diff, residual_inf, energy_diff };

const char* to_string(Preconditioner p) noexcept;
const char* to_string(StopCriterion s) noexcept;
Preconditioner parse_preconditioner(const std::string& s);
StopCriterion parse_stop_criterion(const std::string& s);

struct SolverConfig {
  Preconditioner preconditioner = Preconditioner::combined;
  StopCriterion stop = StopCriterion::energy_diff;
  double tol = 1e-14;
  double theta_trial = 0.1;
  double backtrack_factor = 0.5;
  int max_iters = 100000;
  int max_backtracks = 20;

  void validate() const;
};

struct IterationRow {
  int iter = 0;
  double energy = 0.0;
  double energy_diff = 0.0;
  double residual_inf = 0.0;
  double wavefn_diff_inf = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  int backtracks = 0;
  double elapsed_seconds = 0.0;
};

struct ConvergenceRecord {
  std::vector<IterationRow> rows;
  bool converged = false;
  /// Set when the last step could not lower the energy even along steepest descent.
  bool stalled = false;

  int iterations() const { return static_cast<int>(rows.size()); }
};

/// Per-component preconditioner shifts alpha^l.
using Shifts = std::array<double, 3>;

/// alpha^l = int 1/2 |grad phi_l|^2 + V |phi_l|^2 + c0 rho |phi_l|^2, clamped below at 1e-8.
Shifts compute_shift(const Hamiltonian& ham, const SpinorField& field);

/// V + c0 rho at the current iterate; the divisor entering the potential preconditioner.
RealArray effective_potential(const Hamiltonian& ham, const SpinorField& field);

/// Applies the chosen preconditioner. Throws preconditioner-breakdown when a
/// divisor alpha + V + c0 rho is not positive somewhere.
SpinorField apply_preconditioner(const SpinorField& r, Preconditioner kind, const Shifts& shifts,
                                 const SpectralOps& ops, const RealArray& veff);

/// P = D - Re<D, Phi> Phi
SpinorField project_tangent(const SpinorField& d, const SpinorField& phi);

/// Polak-Ribiere-Polyak momentum clipped at zero; nullopt signals a restart
/// (prev_dot <= 0).
std::optional<double> beta_pr(const SpinorField& r, const SpinorField& r_prev, const SpinorField& pr,
                              double prev_dot);

/// Second-order model E(cos t Phi + sin t P) ~ a t^2 + b t + c for a unit tangent P.
struct LineModel {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

LineModel line_coeffs(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& p_hat);

enum class StepMode { quadratic, trial, restart_steepest };

struct StepChoice {
  double theta = 0.0;
  StepMode mode = StepMode::trial;
};

StepChoice choose_step(double a, double b, double theta_trial);

/// Exact energy along the retraction cos(t) Phi + sin(t) P. The quadratic
/// part comes from three cached inner products, so each evaluation is
/// pointwise work only.
///
/// delta(t) = E(t) - E(0) is expanded in s^2 and cs terms so that it keeps
/// full relative precision when the change is far below the rounding of E.
class RetractionEnergy {
 public:
  RetractionEnergy(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& phi_action,
                   const SpinorField& p_hat, const SpinorField& p_action);

  double operator()(double theta) const { return base_ + delta(theta); }
  double delta(double theta) const;
  double base() const { return base_; }

 private:
  const Hamiltonian& ham_;
  const SpinorField& phi_;
  const SpinorField& p_hat_;
  double aa_ = 0.0, ap_ = 0.0, pp_ = 0.0;
  double base_ = 0.0;
};

struct StepResult {
  SpinorField phi;
  double theta_used = 0.0;
  int backtracks = 0;
  double energy = 0.0;
  bool stalled = false;
};

/// Retraction step with backtracking: accept the first theta, theta*sigma, ...
/// that strictly lowers the energy. On exhaustion returns the input field with
/// stalled = true.
StepResult accept_or_backtrack(const SpinorField& phi, const SpinorField& p_hat, double theta,
                               const SolverConfig& config, const Hamiltonian& ham);

/// Stop test for a completed iteration: strict comparison metric < tol.
bool check_stop(const IterationRow& row, const SolverConfig& config);

struct SolveResult {
  SpinorField phi;
  EnergyBreakdown energy;
  ConvergenceRecord record;
};

/// Optional per-iteration observer; used by tests to check invariants.
struct IterationProbe {
  const SpinorField* phi = nullptr;
  const SpinorField* p = nullptr;    // tangent direction before normalization
  double precond_dot = 0.0;          // Re<P r, r>
  const IterationRow* row = nullptr;
};
using IterationCallback = std::function<void(const IterationProbe&)>;

/// Preconditioned nonlinear conjugate gradient on the unit-norm manifold.
SolveResult pcg_solve(const SpinorField& phi0, const Hamiltonian& ham, const SolverConfig& config,
                      const IterationCallback& callback = {});
SolveResult pcg_solve(const SpinorField& phi0, const PhysicsParams& params, const SolverConfig& config);

namespace testing_hooks {
/// Forces beta = 0 on every iteration (projected preconditioned steepest descent).
struct SolverOverrides {
  bool force_steepest = false;
};
SolveResult pcg_solve_with(const SpinorField& phi0, const Hamiltonian& ham, const SolverConfig& config,
                           SolverOverrides overrides, const IterationCallback& callback = {});
}  // namespace testing_hooks

}  // namespace spgs
