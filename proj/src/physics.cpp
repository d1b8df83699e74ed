#include "spgs/physics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "reduce.hpp"
#include "spgs/error.hpp"

namespace spgs {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Physically real quantities computed from complex sums: the imaginary
// residue must be at rounding level before it is dropped.
double checked_real(cplx v, const char* what) {
  const double tol = 1e-10 * std::max(1.0, std::abs(v.real()));
  if (std::abs(v.imag()) > tol) {
    std::ostringstream os;
    os << what << ": imaginary residue " << v.imag() << " exceeds " << tol;
    throw std::logic_error(os.str());
  }
  return v.real();
}

struct SpinDensity {
  double rho;
  double fz;
  cplx fminus;  // F_x - i F_y
};

inline SpinDensity spin_density(cplx p, cplx z, cplx m) {
  return {std::norm(p) + std::norm(z) + std::norm(m), std::norm(p) - std::norm(m),
          kSqrt2 * (std::conj(z) * p + std::conj(m) * z)};
}

}  // namespace

TrapPotential TrapPotential::harmonic(double gx, double gy, double gz) {
  TrapPotential t;
  t.kind = TrapKind::harmonic;
  t.frequencies = {gx, gy, gz};
  return t;
}

TrapPotential TrapPotential::harmonic_plus_quartic(double a2, double a4) {
  TrapPotential t;
  t.kind = TrapKind::harmonic_plus_quartic;
  t.a2 = a2;
  t.a4 = a4;
  return t;
}

TrapPotential TrapPotential::tabulated(RealArray values) {
  TrapPotential t;
  t.kind = TrapKind::tabulated;
  t.table = std::move(values);
  return t;
}

bool TrapPotential::radially_symmetric_in_plane() const {
  switch (kind) {
    case TrapKind::harmonic: return frequencies[0] == frequencies[1];
    case TrapKind::harmonic_plus_quartic: return true;
    case TrapKind::tabulated: return false;
  }
  return false;
}

void PhysicsParams::validate() const {
  for (double v : {c0, c1, omega, gamma})
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "physics parameters must be finite");
  if (trap.kind == TrapKind::harmonic) {
    for (double g : trap.frequencies)
      if (!(g > 0.0) || !std::isfinite(g))
        throw Error(ErrorKind::invalid_argument, "harmonic trap frequencies must be positive");
  }
  if (trap.kind == TrapKind::harmonic_plus_quartic && (!std::isfinite(trap.a2) || !std::isfinite(trap.a4)))
    throw Error(ErrorKind::invalid_argument, "quartic trap coefficients must be finite");
  if (trap.kind == TrapKind::tabulated)
    for (double v : trap.table)
      if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "tabulated potential must be finite");
}

RealArray eval_potential(const TrapPotential& trap, const GridSpec& grid) {
  const std::size_t Nx = static_cast<std::size_t>(grid.points[0]);
  const std::size_t Ny = static_cast<std::size_t>(grid.points[1]);
  const std::size_t Nz = static_cast<std::size_t>(grid.points[2]);
  if (trap.kind == TrapKind::tabulated) {
    if (trap.table.size() != grid.size())
      throw Error(ErrorKind::invalid_argument, "tabulated potential has " + std::to_string(trap.table.size()) +
                                                   " values, grid has " + std::to_string(grid.size()));
    return trap.table;
  }
  RealArray v(grid.size());
  const auto& g = trap.frequencies;
  for (std::size_t i = 0; i < Nx; ++i)
    for (std::size_t j = 0; j < Ny; ++j)
      for (std::size_t l = 0; l < Nz; ++l) {
        const double x = grid.coord(0, static_cast<int>(i));
        const double y = grid.coord(1, static_cast<int>(j));
        const double z = grid.dim == 3 ? grid.coord(2, static_cast<int>(l)) : 0.0;
        double val;
        if (trap.kind == TrapKind::harmonic) {
          val = 0.5 * (g[0] * g[0] * x * x + g[1] * g[1] * y * y);
          if (grid.dim == 3) val += 0.5 * g[2] * g[2] * z * z;
        } else {
          const double r2 = x * x + y * y;
          val = trap.a2 * r2 + trap.a4 * r2 * r2;
        }
        v[(i * Ny + j) * Nz + l] = val;
      }
  return v;
}

SpinVectorField spin_vector(const SpinorField& field) {
  const std::size_t n = field.points();
  SpinVectorField F{RealArray(n), RealArray(n), RealArray(n)};
  const auto& p = field[kPlus];
  const auto& z = field[kZero];
  const auto& m = field[kMinus];
  for (std::size_t i = 0; i < n; ++i) {
    const cplx fx = kInvSqrt2 * (std::conj(p[i]) * z[i] + std::conj(z[i]) * (p[i] + m[i]) + std::conj(m[i]) * z[i]);
    const cplx fy = kI * kInvSqrt2 * (-std::conj(p[i]) * z[i] + std::conj(z[i]) * (p[i] - m[i]) + std::conj(m[i]) * z[i]);
    const double scale = std::max(1.0, std::norm(p[i]) + std::norm(z[i]) + std::norm(m[i]));
    if (std::abs(fx.imag()) > 1e-12 * scale || std::abs(fy.imag()) > 1e-12 * scale)
      throw std::logic_error("spin_vector: non-real spin density");
    F.fx[i] = fx.real();
    F.fy[i] = fy.real();
    F.fz[i] = std::norm(p[i]) - std::norm(m[i]);
  }
  return F;
}

LinearImage LinearImage::combine(double a, const LinearImage& x, double b, const LinearImage& y) {
  return {SpinorField::combine(a, x.spectrum, b, y.spectrum), SpinorField::combine(a, x.action, b, y.action)};
}

Hamiltonian::Hamiltonian(const GridSpec& grid, PhysicsParams params)
    : ops_(grid), params_(std::move(params)) {
  params_.validate();
  potential_ = eval_potential(params_.trap, grid);
}

LinearImage Hamiltonian::linear_image(const SpinorField& field) const {
  const GridSpec& g = grid();
  if (!(field.grid() == g)) throw Error(ErrorKind::invalid_argument, "Hamiltonian: field grid mismatch");

  LinearImage img{SpinorField(g), SpinorField(g)};
  for (int c = 0; c < 3; ++c) ops_.forward(field[c], img.spectrum[c]);

  const std::size_t n = g.size();
  const auto& lap = ops_.laplacian_symbol();
  const double gamma = params_.gamma;
  const auto& sp = img.spectrum[kPlus];
  const auto& sz = img.spectrum[kZero];
  const auto& sm = img.spectrum[kMinus];
  auto& ap = img.action[kPlus];
  auto& az = img.action[kZero];
  auto& am = img.action[kMinus];

  // Kinetic and spin-orbit parts are diagonal in frequency space.
  ops_.for_each_frequency([&](std::size_t k, double vx, double vy, double) {
    const double kin = -0.5 * lap[k];
    ap[k] = kin * sp[k];
    az[k] = kin * sz[k];
    am[k] = kin * sm[k];
    if (gamma != 0.0) {
      const cplx l0 = SpectralOps::soc_symbol(SocOperator::L0, vx, vy);
      const cplx l1 = SpectralOps::soc_symbol(SocOperator::L1, vx, vy);
      ap[k] -= gamma * l0 * sz[k];
      az[k] -= gamma * (l0 * sm[k] + l1 * sp[k]);
      am[k] -= gamma * l1 * sz[k];
    }
  });
  for (int c = 0; c < 3; ++c) ops_.inverse(img.action[c], img.action[c]);

  for (int c = 0; c < 3; ++c) {
    auto& a = img.action[c];
    const auto& f = field[c];
    for (std::size_t k = 0; k < n; ++k) a[k] += potential_[k] * f[k];
  }

  if (params_.omega != 0.0) {
    // -Omega Lz = i Omega (x d_y - y d_x)
    ComplexArray dx(n), dy(n);
    const cplx w = kI * params_.omega;
    for (int c = 0; c < 3; ++c) {
      const auto& s = img.spectrum[c];
      ops_.for_each_frequency([&](std::size_t k, double vx, double vy, double) {
        dx[k] = kI * vx * s[k];
        dy[k] = kI * vy * s[k];
      });
      ops_.inverse(dx, dx);
      ops_.inverse(dy, dy);
      auto& a = img.action[c];
      ops_.for_each_point([&](std::size_t k, double x, double y, double) { a[k] += w * (x * dy[k] - y * dx[k]); });
    }
  }
  return img;
}

void Hamiltonian::add_interaction(const SpinorField& field, const SpinorField& frozen, SpinorField& out) const {
  const double c0 = params_.c0;
  const double c1 = params_.c1;
  if (c0 == 0.0 && c1 == 0.0) return;
  const std::size_t n = field.points();
  const auto& fp = frozen[kPlus];
  const auto& fz = frozen[kZero];
  const auto& fm = frozen[kMinus];
  const auto& p = field[kPlus];
  const auto& z = field[kZero];
  const auto& m = field[kMinus];
  auto& op = out[kPlus];
  auto& oz = out[kZero];
  auto& om = out[kMinus];
  for (std::size_t k = 0; k < n; ++k) {
    const SpinDensity s = spin_density(fp[k], fz[k], fm[k]);
    const cplx fminus = s.fminus * kInvSqrt2;
    const cplx fplus = std::conj(fminus);
    op[k] += c0 * s.rho * p[k] + c1 * (s.fz * p[k] + fminus * z[k]);
    oz[k] += c0 * s.rho * z[k] + c1 * (fplus * p[k] + fminus * m[k]);
    om[k] += c0 * s.rho * m[k] + c1 * (fplus * z[k] - s.fz * m[k]);
  }
}

SpinorField Hamiltonian::apply(const SpinorField& field) const {
  SpinorField out = apply_linear(field);
  add_interaction(field, field, out);
  return out;
}

SpinorField Hamiltonian::apply_frozen(const SpinorField& field, const SpinorField& frozen) const {
  SpinorField out = apply_linear(field);
  add_interaction(field, frozen, out);
  return out;
}

double Hamiltonian::interaction_energy(const SpinorField& field) const {
  const double c0 = params_.c0;
  const double c1 = params_.c1;
  const auto& p = field[kPlus];
  const auto& z = field[kZero];
  const auto& m = field[kMinus];
  const double sum = detail::pairwise_reduce<double>(0, field.points(), [&](std::size_t k) {
    const SpinDensity s = spin_density(p[k], z[k], m[k]);
    return 0.5 * c0 * s.rho * s.rho + 0.5 * c1 * (s.fz * s.fz + std::norm(s.fminus));
  });
  return sum * field.grid().cell_volume();
}

double Hamiltonian::energy_from_action(const SpinorField& field, const SpinorField& action) const {
  return real_inner(action, field) + interaction_energy(field);
}

EnergyBreakdown Hamiltonian::energy(const SpinorField& field) const {
  const GridSpec& g = grid();
  if (!(field.grid() == g)) throw Error(ErrorKind::invalid_argument, "Hamiltonian: field grid mismatch");
  const double dv = g.cell_volume();
  const std::size_t n = g.size();

  EnergyBreakdown e;
  std::array<ComplexArray, 3> spec;
  for (int c = 0; c < 3; ++c) {
    ops_.forward(field[c], spec[c]);
    e.kin += ops_.kinetic_from_spectrum(spec[c]);
  }

  const RealArray rho = total_density(field);
  e.pot = dv * detail::pairwise_reduce<double>(0, n, [&](std::size_t k) { return potential_[k] * rho[k]; });
  e.spin = interaction_energy(field);

  if (params_.omega != 0.0) {
    cplx lz{0.0, 0.0};
    for (int c = 0; c < 3; ++c) {
      const ComplexArray l = ops_.lz(field[c]);
      const auto& f = field[c];
      lz += detail::pairwise_reduce<cplx>(0, n, [&](std::size_t k) { return l[k] * std::conj(f[k]); });
    }
    e.rot = -params_.omega * checked_real(lz * dv, "rotation energy");
  }

  if (params_.gamma != 0.0) {
    // (S Phi)_1 = L0 phi_0, (S Phi)_0 = L0 phi_-1 + L1 phi_1, (S Phi)_-1 = L1 phi_0
    std::array<ComplexArray, 3> s{ComplexArray(n), ComplexArray(n), ComplexArray(n)};
    ops_.for_each_frequency([&](std::size_t k, double vx, double vy, double) {
      const cplx l0 = SpectralOps::soc_symbol(SocOperator::L0, vx, vy);
      const cplx l1 = SpectralOps::soc_symbol(SocOperator::L1, vx, vy);
      s[kPlus][k] = l0 * spec[kZero][k];
      s[kZero][k] = l0 * spec[kMinus][k] + l1 * spec[kPlus][k];
      s[kMinus][k] = l1 * spec[kZero][k];
    });
    cplx acc{0.0, 0.0};
    for (int c = 0; c < 3; ++c) {
      ops_.inverse(s[c], s[c]);
      const auto& f = field[c];
      const auto& sc = s[c];
      acc += detail::pairwise_reduce<cplx>(0, n, [&](std::size_t k) { return sc[k] * std::conj(f[k]); });
    }
    e.soc = -params_.gamma * checked_real(acc * dv, "spin-orbit energy");
  }

  e.total = e.kin + e.pot + e.spin + e.rot + e.soc;
  e.mu = chemical_potential(field);
  return e;
}

double Hamiltonian::total_energy(const SpinorField& field) const {
  return energy_from_action(field, apply_linear(field));
}

double Hamiltonian::chemical_potential(const SpinorField& field) const {
  return checked_real(inner_product(apply(field), field), "chemical potential");
}

SpinorField Hamiltonian::residual(const SpinorField& field) const {
  SpinorField h = apply(field);
  const double mu = real_inner(h, field) / real_inner(field, field);
  h.axpy(-mu, field);
  return h;
}

double Hamiltonian::virial_residual(const EnergyBreakdown& e) const {
  if (params_.trap.kind != TrapKind::harmonic)
    throw Error(ErrorKind::unsupported_diagnostic, "virial identity requires a harmonic trap");
  return 2.0 * e.kin - 2.0 * e.pot + grid().dim * e.spin + e.soc;
}

double Hamiltonian::virial_residual(const SpinorField& field) const {
  if (params_.trap.kind != TrapKind::harmonic)
    throw Error(ErrorKind::unsupported_diagnostic, "virial identity requires a harmonic trap");
  return virial_residual(energy(field));
}

SpinorField apply_hamiltonian(const SpinorField& field, const PhysicsParams& params) {
  return Hamiltonian(field.grid(), params).apply(field);
}

EnergyBreakdown energy(const SpinorField& field, const PhysicsParams& params) {
  return Hamiltonian(field.grid(), params).energy(field);
}

double chemical_potential(const SpinorField& field, const PhysicsParams& params) {
  return Hamiltonian(field.grid(), params).chemical_potential(field);
}

SpinorField residual(const SpinorField& field, const PhysicsParams& params) {
  return Hamiltonian(field.grid(), params).residual(field);
}

double virial_residual(const SpinorField& field, const PhysicsParams& params) {
  return Hamiltonian(field.grid(), params).virial_residual(field);
}

PhaseAlignment phase_align(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a, b, "phase_align");
  const cplx bb = inner_product(b, b);
  const double bsup = sup_norm(b);
  if (!(bb.real() > 0.0) || !(bsup > 0.0))
    throw Error(ErrorKind::degenerate_input, "phase_align: reference field is zero");
  const cplx kappa = inner_product(a, b) / bb;
  const cplx ck = std::conj(kappa);
  double err = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& x = a[c];
    const auto& y = b[c];
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(ck * x[i] - y[i]));
  }
  return {kappa, err / bsup};
}

ExistenceReport check_existence_conditions(const PhysicsParams& params, int dim) {
  ExistenceReport r;
  if (params.trap.kind != TrapKind::harmonic) {
    r.rotation = ConditionStatus::indeterminate;
    r.messages.emplace_back("existence conditions are only stated for harmonic traps");
  } else {
    const double gmin = std::min(params.trap.frequencies[0], params.trap.frequencies[1]);
    if (std::abs(params.omega) >= gmin) {
      r.rotation = ConditionStatus::warn;
      std::ostringstream os;
      os << "rotation exceeds trap frequency: |Omega| = " << std::abs(params.omega) << " >= min(gx, gy) = " << gmin;
      r.messages.push_back(os.str());
    }
  }

  const double c0 = params.c0, c1 = params.c1;
  if (dim == 3) {
    const bool ok = (c0 >= 0.0 && c1 >= 0.0) || (c1 <= 0.0 && c0 + c1 >= 0.0);
    if (!ok) {
      r.interaction = ConditionStatus::warn;
      r.messages.emplace_back("interaction signs violate the 3D sufficient condition (c0, c1 >= 0 or c1 <= 0, c0 + c1 >= 0)");
    }
  } else {
    if (!(c0 >= 0.0 && c0 + c1 >= 0.0)) {
      r.interaction = ConditionStatus::indeterminate;
      r.messages.emplace_back("2D attractive interaction: existence depends on the Gagliardo-Nirenberg constant, not evaluated");
    }
  }
  return r;
}

}  // namespace spgs
