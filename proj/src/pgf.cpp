#include "spgs/pgf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "spgs/error.hpp"

namespace spgs {

void PgfConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "pgf dt must be positive");
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "pgf tol must be positive");
  if (max_iters < 1) throw Error(ErrorKind::invalid_argument, "pgf max_iters must be at least 1");
  if (!std::isfinite(shift)) throw Error(ErrorKind::invalid_argument, "pgf shift must be finite");
}

double pgf_auto_shift(const Hamiltonian& ham, const SpinorField& phi) {
  const RealArray v = effective_potential(ham, phi);
  return 0.5 * std::max(0.0, *std::max_element(v.begin(), v.end()));
}

namespace {

// Returns the normalized step and leaves H(phi) in `hphi` for the caller.
SpinorField step_impl(const SpinorField& phi, const Hamiltonian& ham, double dt, double alpha, SpinorField& hphi) {
  const SpectralOps& ops = ham.ops();
  LinearImage img = ham.linear_image(phi);
  hphi = img.action;
  ham.add_interaction(phi, phi, hphi);
  const double mu = real_inner(hphi, phi);

  const auto& lap = ops.laplacian_symbol();
  SpinorField next(phi.grid());
  for (int c = 0; c < 3; ++c) {
    ComplexArray& s = next[c];
    ops.forward(hphi[c], s);
    const auto& sp = img.spectrum[c];
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double kin = -0.5 * lap[k];
      // explicit part: H - mu - kin - alpha; implicit part: kin + alpha
      const cplx rhs = sp[k] - dt * (s[k] - (mu + kin + alpha) * sp[k]);
      s[k] = rhs / (1.0 + dt * (alpha + kin));
    }
    ops.inverse(s, s);
  }
  return normalize(next);
}

}  // namespace

SpinorField pgf_step(const SpinorField& phi, const Hamiltonian& ham, double dt, double alpha) {
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "pgf dt must be positive");
  SpinorField hphi;
  return step_impl(phi, ham, dt, alpha, hphi);
}

SolveResult pgf_solve(const SpinorField& phi0, const Hamiltonian& ham, const PgfConfig& config) {
  config.validate();
  if (!(phi0.grid() == ham.grid())) throw Error(ErrorKind::invalid_argument, "pgf_solve: initial guess grid mismatch");
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();

  SolveResult result;
  ConvergenceRecord& rec = result.record;
  SpinorField phi = normalize(phi0);
  const double alpha = config.shift < 0.0 ? pgf_auto_shift(ham, phi) : config.shift;
  double e = ham.total_energy(phi);
  SpinorField hphi;

  SolverConfig stop;
  stop.stop = config.stop;
  stop.tol = config.tol;

  for (int it = 0; it < config.max_iters; ++it) {
    SpinorField next = step_impl(phi, ham, config.dt, alpha, hphi);
    const double mu = real_inner(hphi, phi);
    SpinorField r = hphi;
    r.axpy(-mu, phi);

    IterationRow row;
    row.iter = it + 1;
    row.residual_inf = sup_norm(r);
    if (config.stop == StopCriterion::residual_inf && row.residual_inf < config.tol) {
      rec.converged = true;
      break;
    }
    const double e_new = ham.total_energy(next);
    row.energy = e_new;
    row.energy_diff = std::abs(e - e_new);
    row.wavefn_diff_inf = sup_diff(next, phi);
    row.theta = config.dt;
    row.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rec.rows.push_back(row);
    phi = std::move(next);
    e = e_new;
    if (!phi.all_finite() || !std::isfinite(e)) break;
    if (check_stop(row, stop)) {
      rec.converged = true;
      break;
    }
  }

  result.phi = std::move(phi);
  result.energy = ham.energy(result.phi);
  return result;
}

SolveResult pgf_solve(const SpinorField& phi0, const PhysicsParams& params, const PgfConfig& config) {
  const Hamiltonian ham(phi0.grid(), params);
  return pgf_solve(phi0, ham, config);
}

}  // namespace spgs
