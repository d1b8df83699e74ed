#include "spgs/driver.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "spgs/error.hpp"

namespace spgs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunOutcome from_solve(SolveResult&& r) {
  RunOutcome o;
  o.phi = std::move(r.phi);
  o.energy = r.energy;
  o.converged = r.record.converged;
  o.iterations = r.record.iterations();
  o.levels.push_back(r.record);
  o.record = std::move(r.record);
  return o;
}

}  // namespace

RunOutcome run_solve(const RunConfig& config, const GuessTriple& guess) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome o;
  switch (config.method) {
    case SolveMethodKind::pcg:
      o = from_solve(pcg_solve(make_spinor_guess(guess, config.grid, config.physics), config.physics, config.solver));
      break;
    case SolveMethodKind::pgf:
      o = from_solve(pgf_solve(make_spinor_guess(guess, config.grid, config.physics), config.physics, config.pgf));
      break;
    case SolveMethodKind::cm_pcg: {
      const MultigridPlan plan = config.plan();
      CascadeResult c = cm_pcg_solve(make_spinor_guess(guess, plan.levels.front(), config.physics), config.physics, plan);
      o.converged = c.converged();
      o.iterations = c.total_iterations();
      for (auto& l : c.levels) o.levels.push_back(l.record);
      o.phi = std::move(c.levels.back().phi);
      o.energy = c.levels.back().energy;
      o.record = c.levels.back().record;
      break;
    }
  }
  o.seconds = seconds_since(t0);
  return o;
}

Diagnostics diagnose(const SpinorField& phi, const PhysicsParams& params) {
  const Hamiltonian ham(phi.grid(), params);
  Diagnostics d;
  d.energy = ham.energy(phi);
  d.residual_inf = sup_norm(ham.residual(phi));
  if (params.trap.kind == TrapKind::harmonic) d.virial = ham.virial_residual(d.energy);
  d.existence = check_existence_conditions(params, phi.grid().dim);
  return d;
}

SpinorField restrict_to(const SpinorField& fine, const GridSpec& coarse) {
  const GridSpec& fg = fine.grid();
  if (fg.dim != coarse.dim) throw Error(ErrorKind::invalid_argument, "restriction: dimension mismatch");
  std::array<int, 3> ratio{1, 1, 1};
  for (int a = 0; a < fg.dim; ++a) {
    const int r = coarse.points[a] > 0 ? fg.points[a] / coarse.points[a] : 0;
    if (r < 1 || r * coarse.points[a] != fg.points[a] || fg.half_width[a] != coarse.half_width[a])
      throw Error(ErrorKind::invalid_argument,
                  "grid " + coarse.describe() + " is not nested in " + fg.describe());
    ratio[a] = r;
  }
  const int n1 = fg.dim > 1 ? coarse.points[1] : 1, n2 = fg.dim > 2 ? coarse.points[2] : 1;
  const int f1 = fg.dim > 1 ? fg.points[1] : 1, f2 = fg.dim > 2 ? fg.points[2] : 1;
  SpinorField out(coarse);
  for (int c = 0; c < 3; ++c) {
    std::size_t k = 0;
    for (int i = 0; i < coarse.points[0]; ++i)
      for (int j = 0; j < n1; ++j)
        for (int l = 0; l < n2; ++l, ++k) {
          const std::size_t src =
              (static_cast<std::size_t>(i * ratio[0]) * f1 + static_cast<std::size_t>(j * ratio[1])) * f2 + l * ratio[2];
          out[c][k] = fine[c][src];
        }
  }
  return out;
}

double wavefn_error(const SpinorField& coarse, const SpinorField& reference) {
  return phase_align(coarse, restrict_to(reference, coarse.grid())).error;
}

StudyResult convergence_study(const RunConfig& config, const GuessTriple& guess, const SpinorField* reference) {
  if (config.study_points.empty())
    throw Error(ErrorKind::invalid_argument, "convergence-study needs [study] points and reference_points");
  const int dim = config.grid.dim;
  auto grid_with = [&](int n) {
    std::array<int, 3> pts{};
    for (int a = 0; a < dim; ++a) pts[a] = n * config.grid.points[a] / config.grid.points[0];
    return make_grid(dim, std::span<const double>(config.grid.half_width.data(), dim),
                     std::span<const int>(pts.data(), dim));
  };
  const GridSpec coarse = grid_with(config.study_points.front());
  const GridSpec finest = grid_with(reference ? config.study_points.back() : config.study_reference_points);
  if (reference) {
    const GridSpec ref_grid = grid_with(config.study_reference_points);
    if (!(reference->grid() == ref_grid))
      throw Error(ErrorKind::invalid_argument, "reference field grid " + reference->grid().describe() +
                                                   " does not match the study reference " + ref_grid.describe());
  }

  const CascadeResult c = cm_pcg_solve(make_spinor_guess(guess, coarse, config.physics), config.physics,
                                       MultigridPlan::between(coarse, finest, config.solver));
  StudyResult out;
  if (reference) {
    out.reference = *reference;
    out.reference_energy = energy(*reference, config.physics);
  } else {
    out.reference = c.levels.back().phi;
    out.reference_energy = c.levels.back().energy;
  }
  const std::size_t n = config.study_points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const LevelResult& l = c.levels[i];
    StudyRow row;
    row.points = l.phi.grid().points[0];
    row.h = l.phi.grid().h(0);
    row.wavefn_error = wavefn_error(l.phi, out.reference);
    row.energy_error = std::abs(out.reference_energy.total - l.energy.total);
    row.mu_error = std::abs(out.reference_energy.mu - l.energy.mu);
    if (config.physics.trap.kind == TrapKind::harmonic)
      row.virial = Hamiltonian(l.phi.grid(), config.physics).virial_residual(l.energy);
    row.iterations = l.record.iterations();
    row.converged = l.record.converged;
    out.rows.push_back(row);
  }
  return out;
}

CompareResult compare_methods(const RunConfig& config, const GuessTriple& guess) {
  if (!config.compare_pgf) throw Error(ErrorKind::invalid_argument, "compare needs [compare] pgf = true");
  RunConfig pc = config;
  pc.method = SolveMethodKind::pcg;
  RunConfig pg = config;
  pg.method = SolveMethodKind::pgf;
  CompareResult r;
  r.pcg = run_solve(pc, guess);
  r.pgf = run_solve(pg, guess);
  r.reference_energy = std::min(r.pcg.energy.total, r.pgf.energy.total);
  return r;
}

std::string compare_csv(const CompareResult& r) {
  std::ostringstream os;
  os << "iter,pcg_energy_error,pcg_residual_inf,pgf_energy_error,pgf_residual_inf\n" << std::setprecision(10);
  const auto& a = r.pcg.record.rows;
  const auto& b = r.pgf.record.rows;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    os << i + 1 << ',';
    if (i < a.size()) os << std::abs(a[i].energy - r.reference_energy) << ',' << a[i].residual_inf;
    else os << ',';
    os << ',';
    if (i < b.size()) os << std::abs(b[i].energy - r.reference_energy) << ',' << b[i].residual_inf;
    else os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace spgs
