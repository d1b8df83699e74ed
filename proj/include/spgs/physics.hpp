#pragma once

#include <array>
#include <string>
#include <vector>

#include "spgs/field.hpp"
#include "spgs/spectral.hpp"

namespace spgs {

enum class TrapKind { harmonic, harmonic_plus_quartic, tabulated };

/// External trapping potential.
///
/// harmonic:               V = 1/2 (gx^2 x^2 + gy^2 y^2 [+ gz^2 z^2])
/// harmonic_plus_quartic:  V = a2 r^2 + a4 r^4 with r^2 = x^2 + y^2
/// tabulated:              values sampled on the grid, row-major
struct TrapPotential {
  TrapKind kind = TrapKind::harmonic;
  std::array<double, 3> frequencies{1.0, 1.0, 1.0};
  double a2 = -0.2;
  double a4 = 0.5;
  RealArray table;

  static TrapPotential harmonic(double gx = 1.0, double gy = 1.0, double gz = 1.0);
  static TrapPotential harmonic_plus_quartic(double a2 = -0.2, double a4 = 0.5);
  static TrapPotential tabulated(RealArray values);

  /// True when V depends on (x, y) only through x^2 + y^2.
  bool radially_symmetric_in_plane() const;
};

struct PhysicsParams {
  double c0 = 0.0;     // spin-independent interaction
  double c1 = 0.0;     // spin-exchange interaction
  double omega = 0.0;  // rotation speed
  double gamma = 0.0;  // spin-orbit coupling strength
  TrapPotential trap{};

  void validate() const;
};

RealArray eval_potential(const TrapPotential& trap, const GridSpec& grid);

/// Pointwise spin vector F = (Phi^dag f_x Phi, Phi^dag f_y Phi, Phi^dag f_z Phi).
struct SpinVectorField {
  RealArray fx, fy, fz;
};

SpinVectorField spin_vector(const SpinorField& field);

struct EnergyBreakdown {
  double kin = 0.0;
  double pot = 0.0;
  double spin = 0.0;
  double rot = 0.0;
  double soc = 0.0;
  double total = 0.0;
  double mu = 0.0;
};

/// Linear images of a field: its per-component spectrum and the action of the
/// Hermitian linear operator A = -1/2 Lap + V - Omega Lz - gamma S. Both are
/// linear in the field, so images of cos(t) Phi + sin(t) P can be recombined
/// from the images of Phi and P without new transforms.
struct LinearImage {
  SpinorField spectrum;
  SpinorField action;

  static LinearImage combine(double a, const LinearImage& x, double b, const LinearImage& y);
};

/// The coupled spin-1 Hamiltonian for fixed physics on a fixed grid.
class Hamiltonian {
 public:
  Hamiltonian(const GridSpec& grid, PhysicsParams params);

  const GridSpec& grid() const { return ops_.grid(); }
  const SpectralOps& ops() const { return ops_; }
  const PhysicsParams& params() const { return params_; }
  const RealArray& potential() const { return potential_; }

  LinearImage linear_image(const SpinorField& field) const;
  SpinorField apply_linear(const SpinorField& field) const { return linear_image(field).action; }

  /// out += interaction terms of H acting on `field`, with density and spin
  /// vector taken from `frozen` (pass the same field for the true H(Phi)).
  void add_interaction(const SpinorField& field, const SpinorField& frozen, SpinorField& out) const;

  /// H(Phi) = (H_1, H_0, H_-1).
  SpinorField apply(const SpinorField& field) const;
  /// Hamiltonian with density and spin frozen at `frozen`, applied to `field`.
  SpinorField apply_frozen(const SpinorField& field, const SpinorField& frozen) const;

  /// int c0/2 rho^2 + c1/2 |F|^2
  double interaction_energy(const SpinorField& field) const;

  /// Total energy from a precomputed linear action: Re<A Phi, Phi> + interaction.
  double energy_from_action(const SpinorField& field, const SpinorField& action) const;

  EnergyBreakdown energy(const SpinorField& field) const;
  double total_energy(const SpinorField& field) const;
  double chemical_potential(const SpinorField& field) const;
  SpinorField residual(const SpinorField& field) const;

  /// 2 kin - 2 pot + d spin + soc; requires a harmonic trap.
  double virial_residual(const SpinorField& field) const;
  double virial_residual(const EnergyBreakdown& e) const;

 private:
  SpectralOps ops_;
  PhysicsParams params_;
  RealArray potential_;
};

// Free-function forms; each builds a Hamiltonian for the field's grid.
SpinorField apply_hamiltonian(const SpinorField& field, const PhysicsParams& params);
EnergyBreakdown energy(const SpinorField& field, const PhysicsParams& params);
double chemical_potential(const SpinorField& field, const PhysicsParams& params);
SpinorField residual(const SpinorField& field, const PhysicsParams& params);
double virial_residual(const SpinorField& field, const PhysicsParams& params);

struct PhaseAlignment {
  cplx kappa;
  double error;  // ||conj(kappa) a - b||_inf / ||b||_inf
};

/// kappa = <a, b> / <b, b> and the phase-aligned relative sup-norm error.
PhaseAlignment phase_align(const SpinorField& a, const SpinorField& b);

enum class ConditionStatus { pass, warn, indeterminate };

struct ExistenceReport {
  ConditionStatus rotation = ConditionStatus::pass;
  ConditionStatus interaction = ConditionStatus::pass;
  std::vector<std::string> messages;

  bool ok() const { return rotation == ConditionStatus::pass && interaction == ConditionStatus::pass; }
};

/// Advisory check of the sufficient conditions for a ground state to exist.
ExistenceReport check_existence_conditions(const PhysicsParams& params, int dim);

}  // namespace spgs
