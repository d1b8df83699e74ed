#include "spgs/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "reduce.hpp"
#include "spgs/error.hpp"

namespace spgs {

namespace {

constexpr double kShiftFloor = 1e-8;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr cplx kI{0.0, 1.0};
// Rounding drift of the recombined linear action is reset this often.
constexpr int kRefreshEvery = 16;

Shifts shifts_from(const Hamiltonian& ham, const SpinorField& field, const SpinorField& spectrum,
                   const RealArray& veff) {
  const double dv = field.grid().cell_volume();
  Shifts s{};
  for (int c = 0; c < 3; ++c) {
    const auto& f = field[c];
    const double pot = dv * detail::pairwise_reduce<double>(0, f.size(), [&](std::size_t k) {
      return veff[k] * std::norm(f[k]);
    });
    const double a = ham.ops().kinetic_from_spectrum(spectrum[c]) + pot;
    s[static_cast<std::size_t>(c)] = a > 0.0 ? a : kShiftFloor;
  }
  return s;
}

void kinetic_solve(ComplexArray& x, double alpha, const SpectralOps& ops) {
  ops.forward(x, x);
  const auto& lap = ops.laplacian_symbol();
  for (std::size_t k = 0; k < x.size(); ++k) x[k] /= alpha - 0.5 * lap[k];
  ops.inverse(x, x);
}

// sum_alpha (Re a^dag f_alpha b)^2
double spin_bilinear_sq(cplx a1, cplx a0, cplx am, cplx b1, cplx b0, cplx bm) {
  const cplx fx = kInvSqrt2 * (std::conj(a1) * b0 + std::conj(a0) * (b1 + bm) + std::conj(am) * b0);
  const cplx fy = kI * kInvSqrt2 * (-std::conj(a1) * b0 + std::conj(a0) * (b1 - bm) + std::conj(am) * b0);
  const cplx fz = std::conj(a1) * b1 - std::conj(am) * bm;
  return fx.real() * fx.real() + fy.real() * fy.real() + fz.real() * fz.real();
}

// a without -mu and without the frozen quadratic form: 2 int c0 (Re Phi^dag P)^2 + c1 sum (Re P^dag f Phi)^2
double cross_curvature(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& p) {
  const double c0 = ham.params().c0, c1 = ham.params().c1;
  if (c0 == 0.0 && c1 == 0.0) return 0.0;
  const auto &f1 = phi[kPlus], &f0 = phi[kZero], &fm = phi[kMinus];
  const auto &p1 = p[kPlus], &p0 = p[kZero], &pm = p[kMinus];
  const double sum = detail::pairwise_reduce<double>(0, phi.points(), [&](std::size_t k) {
    const double re = (std::conj(f1[k]) * p1[k] + std::conj(f0[k]) * p0[k] + std::conj(fm[k]) * pm[k]).real();
    double v = c0 * re * re;
    if (c1 != 0.0) v += c1 * spin_bilinear_sq(p1[k], p0[k], pm[k], f1[k], f0[k], fm[k]);
    return v;
  });
  return 2.0 * sum * phi.grid().cell_volume();
}

// Re<H_Phi P, P> given A P
double frozen_form(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& p, const SpinorField& ap) {
  SpinorField tmp(p.grid());
  ham.add_interaction(p, phi, tmp);
  return real_inner(ap, p) + real_inner(tmp, p);
}

LineModel line_model(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& hphi, double mu,
                     double e, const SpinorField& p, const SpinorField& ap) {
  LineModel m;
  m.a = -mu + frozen_form(ham, phi, p, ap) + cross_curvature(ham, phi, p);
  m.b = 2.0 * real_inner(hphi, p);
  m.c = e;
  return m;
}

struct Backtrack {
  double theta = 0.0;
  int backtracks = 0;
  double energy = 0.0;
  double decrease = 0.0;
  bool stalled = false;
};

Backtrack backtrack(const RetractionEnergy& en, double e0, double theta, const SolverConfig& config) {
  Backtrack out;
  for (int n = 0; n <= config.max_backtracks; ++n) {
    const double d = en.delta(theta);
    if (std::isfinite(d) && d < 0.0) {
      out.theta = theta;
      out.backtracks = n;
      out.energy = e0 + d;
      out.decrease = -d;
      return out;
    }
    theta *= config.backtrack_factor;
  }
  out.stalled = true;
  out.backtracks = config.max_backtracks;
  out.energy = e0;
  return out;
}

}  // namespace

const char* to_string(Preconditioner p) noexcept {
  switch (p) {
    case Preconditioner::kinetic: return "kinetic";
    case Preconditioner::potential: return "potential";
    case Preconditioner::combined: return "combined";
    case Preconditioner::none: return "none";
  }
  return "?";
}

const char* to_string(StopCriterion s) noexcept {
  switch (s) {
    case StopCriterion::wavefn_diff: return "wavefn_diff";
    case StopCriterion::residual_inf: return "residual_inf";
    case StopCriterion::energy_diff: return "energy_diff";
  }
  return "?";
}

Preconditioner parse_preconditioner(const std::string& s) {
  for (auto p : {Preconditioner::kinetic, Preconditioner::potential, Preconditioner::combined, Preconditioner::none})
    if (s == to_string(p)) return p;
  throw Error(ErrorKind::invalid_argument, "unknown preconditioner '" + s + "' (kinetic, potential, combined, none)");
}

StopCriterion parse_stop_criterion(const std::string& s) {
  for (auto c : {StopCriterion::wavefn_diff, StopCriterion::residual_inf, StopCriterion::energy_diff})
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::invalid_argument,
              "unknown stopping criterion '" + s + "' (wavefn_diff, residual_inf, energy_diff)");
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  if (!(theta_trial > 0.0)) throw Error(ErrorKind::invalid_argument, "theta_trial must be positive");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw Error(ErrorKind::invalid_argument, "backtrack_factor must lie in (0, 1)");
  if (max_iters < 1) throw Error(ErrorKind::invalid_argument, "max_iters must be at least 1");
  if (max_backtracks < 1) throw Error(ErrorKind::invalid_argument, "max_backtracks must be at least 1");
}

RealArray effective_potential(const Hamiltonian& ham, const SpinorField& field) {
  RealArray v = ham.potential();
  const double c0 = ham.params().c0;
  if (c0 != 0.0) {
    const RealArray rho = total_density(field);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c0 * rho[k];
  }
  return v;
}

Shifts compute_shift(const Hamiltonian& ham, const SpinorField& field) {
  SpinorField spec(field.grid());
  for (int c = 0; c < 3; ++c) ham.ops().forward(field[c], spec[c]);
  return shifts_from(ham, field, spec, effective_potential(ham, field));
}

SpinorField apply_preconditioner(const SpinorField& r, Preconditioner kind, const Shifts& shifts,
                                 const SpectralOps& ops, const RealArray& veff) {
  if (!(r.grid() == ops.grid())) throw Error(ErrorKind::invalid_argument, "apply_preconditioner: grid mismatch");
  for (double a : shifts)
    if (!(a > 0.0)) throw Error(ErrorKind::preconditioner_breakdown, "preconditioner shift is not positive");
  SpinorField out = r;
  if (kind == Preconditioner::none) return out;
  if (kind != Preconditioner::kinetic && veff.size() != r.points())
    throw Error(ErrorKind::invalid_argument, "apply_preconditioner: potential has the wrong size");

  for (int c = 0; c < 3; ++c) {
    const double alpha = shifts[static_cast<std::size_t>(c)];
    auto& x = out[c];
    if (kind == Preconditioner::kinetic) {
      kinetic_solve(x, alpha, ops);
      continue;
    }
    RealArray w(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = alpha + veff[k];
      if (!(d > 0.0))
        throw Error(ErrorKind::preconditioner_breakdown, "potential preconditioner divisor is not positive");
      w[k] = kind == Preconditioner::potential ? 1.0 / d : 1.0 / std::sqrt(d);
    }
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= w[k];
    if (kind == Preconditioner::combined) {
      kinetic_solve(x, alpha, ops);
      for (std::size_t k = 0; k < x.size(); ++k) x[k] *= w[k];
    }
  }
  return out;
}

SpinorField project_tangent(const SpinorField& d, const SpinorField& phi) {
  require_same_grid(d, phi, "project_tangent");
  SpinorField p = d;
  p.axpy(-real_inner(d, phi), phi);
  return p;
}

std::optional<double> beta_pr(const SpinorField& r, const SpinorField& r_prev, const SpinorField& pr,
                              double prev_dot) {
  if (!(prev_dot > 0.0)) return std::nullopt;
  const double num = real_inner(r, pr) - real_inner(r_prev, pr);
  return std::max(num / prev_dot, 0.0);
}

LineModel line_coeffs(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& p_hat) {
  require_same_grid(phi, p_hat, "line_coeffs");
  const SpinorField aphi = ham.apply_linear(phi);
  SpinorField hphi = aphi;
  ham.add_interaction(phi, phi, hphi);
  const double mu = real_inner(hphi, phi);
  const double e = ham.energy_from_action(phi, aphi);
  return line_model(ham, phi, hphi, mu, e, p_hat, ham.apply_linear(p_hat));
}

StepChoice choose_step(double a, double b, double theta_trial) {
  if (b > 0.0 || (b == 0.0 && a >= 0.0)) return {0.0, StepMode::restart_steepest};
  if (a > 0.0 && b < 0.0) return {-b / (2.0 * a), StepMode::quadratic};
  return {theta_trial, StepMode::trial};
}

RetractionEnergy::RetractionEnergy(const Hamiltonian& ham, const SpinorField& phi, const SpinorField& phi_action,
                                   const SpinorField& p_hat, const SpinorField& p_action)
    : ham_(ham), phi_(phi), p_hat_(p_hat) {
  aa_ = real_inner(phi_action, phi);
  // A is Hermitian; average the two cross terms to keep the form symmetric in rounding.
  ap_ = 0.5 * (real_inner(p_action, phi) + real_inner(phi_action, p_hat));
  pp_ = real_inner(p_action, p_hat);
  base_ = aa_ + ham.interaction_energy(phi);
}

double RetractionEnergy::delta(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double s2 = s * s, cs = c * s;
  // cos^2 - 1 = -sin^2
  const double quad = s2 * (pp_ - aa_) + 2.0 * cs * ap_;
  const double c0 = ham_.params().c0, c1 = ham_.params().c1;
  if (c0 == 0.0 && c1 == 0.0) return quad;

  const auto &f1 = phi_[kPlus], &f0 = phi_[kZero], &fm = phi_[kMinus];
  const auto &p1 = p_hat_[kPlus], &p0 = p_hat_[kZero], &pm = p_hat_[kMinus];
  const double sum = detail::pairwise_reduce<double>(0, phi_.points(), [&](std::size_t k) {
    const double n1 = std::norm(f1[k]), n0 = std::norm(f0[k]), nm = std::norm(fm[k]);
    const double q1 = std::norm(p1[k]), q0 = std::norm(p0[k]), qm = std::norm(pm[k]);
    const double x1 = (std::conj(f1[k]) * p1[k]).real();
    const double x0 = (std::conj(f0[k]) * p0[k]).real();
    const double xm = (std::conj(fm[k]) * pm[k]).real();

    const double rho = n1 + n0 + nm;
    const double drho = s2 * (q1 + q0 + qm - rho) + 2.0 * cs * (x1 + x0 + xm);
    double v = 0.5 * c0 * drho * (2.0 * rho + drho);
    if (c1 != 0.0) {
      const double fz = n1 - nm;
      const double dfz = s2 * (q1 - qm - fz) + 2.0 * cs * (x1 - xm);
      // F_- / sqrt(2) = conj(phi_0) phi_1 + conj(phi_-1) phi_0, expanded bilinearly.
      const cplx fmf = std::conj(f0[k]) * f1[k] + std::conj(fm[k]) * f0[k];
      const cplx fmp = std::conj(p0[k]) * p1[k] + std::conj(pm[k]) * p0[k];
      const cplx fmx = std::conj(f0[k]) * p1[k] + std::conj(p0[k]) * f1[k] + std::conj(fm[k]) * p0[k] +
                       std::conj(pm[k]) * f0[k];
      const cplx dfm = s2 * (fmp - fmf) + cs * fmx;
      // |F|^2 = Fz^2 + 2 |F_-/sqrt 2|^2
      v += 0.5 * c1 * (dfz * (2.0 * fz + dfz) + 2.0 * (2.0 * (std::conj(fmf) * dfm).real() + std::norm(dfm)));
    }
    return v;
  });
  return quad + sum * phi_.grid().cell_volume();
}

StepResult accept_or_backtrack(const SpinorField& phi, const SpinorField& p_hat, double theta,
                               const SolverConfig& config, const Hamiltonian& ham) {
  require_same_grid(phi, p_hat, "accept_or_backtrack");
  const SpinorField aphi = ham.apply_linear(phi);
  const SpinorField ap = ham.apply_linear(p_hat);
  const RetractionEnergy en(ham, phi, aphi, p_hat, ap);
  const double e0 = ham.energy_from_action(phi, aphi);
  StepResult out;
  if (theta == 0.0) {
    out.phi = phi;
    out.energy = e0;
    return out;
  }
  const Backtrack bt = backtrack(en, e0, theta, config);
  out.backtracks = bt.backtracks;
  out.energy = bt.energy;
  out.stalled = bt.stalled;
  if (bt.stalled) {
    out.phi = phi;
    return out;
  }
  out.theta_used = bt.theta;
  out.phi = SpinorField::combine(std::cos(bt.theta), phi, std::sin(bt.theta), p_hat);
  return out;
}

bool check_stop(const IterationRow& row, const SolverConfig& config) {
  switch (config.stop) {
    case StopCriterion::wavefn_diff: return row.wavefn_diff_inf < config.tol;
    case StopCriterion::residual_inf: return row.residual_inf < config.tol;
    case StopCriterion::energy_diff: return row.energy_diff < config.tol;
  }
  return false;
}

namespace testing_hooks {

SolveResult pcg_solve_with(const SpinorField& phi0, const Hamiltonian& ham, const SolverConfig& config,
                           SolverOverrides overrides, const IterationCallback& callback) {
  config.validate();
  if (!(phi0.grid() == ham.grid())) throw Error(ErrorKind::invalid_argument, "pcg_solve: initial guess grid mismatch");
  if (!phi0.all_finite()) throw Error(ErrorKind::invalid_argument, "pcg_solve: initial guess is not finite");

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const SpectralOps& ops = ham.ops();

  SolveResult result;
  ConvergenceRecord& rec = result.record;

  SpinorField phi = normalize(phi0);
  LinearImage img = ham.linear_image(phi);
  double e = ham.energy_from_action(phi, img.action);

  SpinorField r_prev, p_prev;
  double prev_dot = 0.0;
  bool have_prev = false;
  bool force_plain = false;  // one unpreconditioned steepest step after breakdown or stall

  for (int it = 0; it < config.max_iters; ++it) {
    SpinorField hphi = img.action;
    ham.add_interaction(phi, phi, hphi);
    const double mu = real_inner(hphi, phi);
    SpinorField r = hphi;
    r.axpy(-mu, phi);
    const double res_inf = sup_norm(r);

    if (config.stop == StopCriterion::residual_inf && res_inf < config.tol) {
      rec.converged = true;
      break;
    }

    const RealArray veff = effective_potential(ham, phi);
    const Shifts shifts = shifts_from(ham, phi, img.spectrum, veff);

    IterationRow row;
    row.iter = it + 1;
    row.residual_inf = res_inf;

    Backtrack bt;
    SpinorField p, p_hat, pr;
    LinearImage p_img;
    double beta = 0.0;
    double pdot = 0.0;
    bool plain = force_plain;
    bool restarted = false;
    for (int attempt = 0;; ++attempt) {
      const Preconditioner kind = plain ? Preconditioner::none : config.preconditioner;
      try {
        pr = apply_preconditioner(r, kind, shifts, ops, veff);
        pdot = real_inner(pr, r);
        if (!(pdot > 0.0) && kind != Preconditioner::none)
          throw Error(ErrorKind::preconditioner_breakdown, "preconditioned residual is not a descent direction");
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::preconditioner_breakdown) throw;
        plain = true;
        pr = r;
        pdot = real_inner(pr, r);
      }

      beta = 0.0;
      if (have_prev && !plain && !restarted && !overrides.force_steepest)
        beta = beta_pr(r, r_prev, pr, prev_dot).value_or(0.0);

      SpinorField d = pr;
      d *= -1.0;
      if (beta != 0.0) d.axpy(beta, p_prev);
      p = project_tangent(d, phi);
      const double pn = norm(p);
      if (!(pn > 0.0) || !std::isfinite(pn)) {
        bt.stalled = true;
        bt.energy = e;
        break;
      }
      p_hat = p;
      p_hat *= 1.0 / pn;
      p_img = ham.linear_image(p_hat);

      const LineModel m = line_model(ham, phi, hphi, mu, e, p_hat, p_img.action);
      const StepChoice ch = choose_step(m.a, m.b, config.theta_trial);
      if (ch.mode == StepMode::restart_steepest) {
        if (beta != 0.0) {
          restarted = true;
          continue;
        }
        // Not a descent direction even without momentum: only rounding is left.
        if (!plain) {
          plain = true;
          continue;
        }
        bt.stalled = true;
        bt.energy = e;
        break;
      }

      const RetractionEnergy en(ham, phi, img.action, p_hat, p_img.action);
      bt = backtrack(en, e, ch.theta, config);
      if (!bt.stalled || plain) break;
      plain = true;
    }
    force_plain = false;

    row.beta = beta;
    row.theta = bt.theta;
    row.backtracks = bt.backtracks;

    if (bt.stalled) {
      // Neither the preconditioned nor the plain gradient direction lowers the
      // energy: the iterate is stationary to rounding.
      rec.stalled = true;
      row.energy = e;
      row.energy_diff = 0.0;
      row.wavefn_diff_inf = 0.0;
      row.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      rec.rows.push_back(row);
      if (callback) callback({&phi, &p, pdot, &rec.rows.back()});
      rec.converged = config.stop == StopCriterion::energy_diff;
      break;
    }

    const double c = std::cos(bt.theta), s = std::sin(bt.theta);
    SpinorField next = SpinorField::combine(c, phi, s, p_hat);
    row.wavefn_diff_inf = sup_diff(next, phi);
    row.energy = bt.energy;
    row.energy_diff = bt.decrease;
    if (callback) callback({&phi, &p, pdot, &row});

    const bool refresh = (it + 1) % kRefreshEvery == 0;
    if (refresh) {
      next = normalize(next);
      img = ham.linear_image(next);
    } else {
      img = LinearImage::combine(c, img, s, p_img);
      const double inv = 1.0 / norm(next);
      next *= inv;
      img.spectrum *= inv;
      img.action *= inv;
    }
    phi = std::move(next);
    e = refresh ? ham.energy_from_action(phi, img.action) : bt.energy;
    row.elapsed_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rec.rows.push_back(row);

    r_prev = std::move(r);
    p_prev = std::move(p);
    prev_dot = plain ? 0.0 : pdot;
    have_prev = !plain;

    if (check_stop(row, config)) {
      rec.converged = true;
      break;
    }
  }

  result.phi = std::move(phi);
  result.energy = ham.energy(result.phi);
  return result;
}

}  // namespace testing_hooks

SolveResult pcg_solve(const SpinorField& phi0, const Hamiltonian& ham, const SolverConfig& config,
                      const IterationCallback& callback) {
  return testing_hooks::pcg_solve_with(phi0, ham, config, {}, callback);
}

SolveResult pcg_solve(const SpinorField& phi0, const PhysicsParams& params, const SolverConfig& config) {
  const Hamiltonian ham(phi0.grid(), params);
  return pcg_solve(phi0, ham, config);
}

}  // namespace spgs
