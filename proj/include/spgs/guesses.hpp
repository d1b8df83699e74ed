#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spgs/field.hpp"
#include "spgs/multigrid.hpp"
#include "spgs/physics.hpp"

namespace spgs {

enum class GuessTag { a, b, bbar, c, cbar, d, dbar, e, ebar, f };

inline constexpr std::array<GuessTag, 10> kAllGuessTags{GuessTag::a, GuessTag::b,    GuessTag::bbar, GuessTag::c,
                                                        GuessTag::cbar, GuessTag::d, GuessTag::dbar, GuessTag::e,
                                                        GuessTag::ebar, GuessTag::f};

const char* to_string(GuessTag t) noexcept;
GuessTag parse_guess_tag(const std::string& s);

using GuessTriple = std::array<GuessTag, 3>;
std::string to_string(const GuessTriple& t);
/// "a", "a,b,bbar" or "a b bbar"; a single tag is repeated on all components.
GuessTriple parse_guess_triple(const std::string& s);

/// Thomas-Fermi chemical potential for a harmonic trap.
double thomas_fermi_mu(const PhysicsParams& params, int dim);

/// One scalar initial state with unit discrete mass.
ComplexArray make_guess(GuessTag tag, const GridSpec& grid, const PhysicsParams& params);

/// (phi_1, phi_0, phi_-1) / sqrt(3) from three unit-mass scalar guesses.
SpinorField make_spinor_guess(const GuessTriple& tags, const GridSpec& grid, const PhysicsParams& params);

/// The ten identical-component triples (t, t, t).
std::vector<GuessTriple> identical_triples(const std::vector<GuessTag>& tags = {kAllGuessTags.begin(), kAllGuessTags.end()});
/// All ordered triples over `tags` (1000 for the full set).
std::vector<GuessTriple> all_triples(const std::vector<GuessTag>& tags = {kAllGuessTags.begin(), kAllGuessTags.end()});

enum class SolveMethod { pcg, cm_pcg };

struct SweepOptions {
  SolveMethod method = SolveMethod::pcg;
  SolverConfig solver{};  // used for method = pcg
  MultigridPlan plan{};   // used for method = cm_pcg; the guess is built on the coarsest level
  GridSpec grid{};        // used for method = pcg
  int jobs = 1;
};

struct SweepEntry {
  GuessTriple tags{};
  bool ok = false;
  bool converged = false;
  int iterations = 0;
  double energy = 0.0;
  double residual_inf = 0.0;
  double seconds = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // input order
  std::size_t best = 0;
  SpinorField best_phi;
  EnergyBreakdown best_energy;
  ConvergenceRecord best_record;
};

/// Solves from every triple and keeps the lowest-energy stationary state.
/// Solves run on up to `jobs` threads; the result does not depend on `jobs`.
SweepResult sweep_guesses(const std::vector<GuessTriple>& triples, const PhysicsParams& params,
                          const SweepOptions& options);

}  // namespace spgs
