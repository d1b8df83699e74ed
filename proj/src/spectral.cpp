#include "spgs/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "reduce.hpp"
#include "spgs/error.hpp"

namespace spgs {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

SpectralOps::SpectralOps(const GridSpec& grid) : grid_(grid), plan_(FftPlan::for_grid(grid)) {
  for (int a = 0; a < 3; ++a) {
    const int n = grid.points[a];
    auto& w = wave_[a];
    auto& x = coord_[a];
    w.assign(static_cast<std::size_t>(n), 0.0);
    x.assign(static_cast<std::size_t>(n), 0.0);
    if (a >= grid.dim) continue;
    const double l = grid.half_width[a];
    for (int k = 0; k < n; ++k) {
      const int p = k < n / 2 ? k : k - n;
      w[k] = std::numbers::pi * p / l;
      x[k] = grid.coord(a, k);
    }
  }

  lap_.resize(grid.size());
  for_each_frequency([&](std::size_t k, double vx, double vy, double vz) { lap_[k] = -(vx * vx + vy * vy + vz * vz); });
}

cplx SpectralOps::soc_symbol(SocOperator which, std::size_t k) const {
  const std::size_t Ny = ny(), Nz = nz();
  const std::size_t i = k / (Ny * Nz);
  const std::size_t j = (k / Nz) % Ny;
  return soc_symbol(which, wave_[0][i], wave_[1][j]);
}

void SpectralOps::forward(const ComplexArray& in, ComplexArray& out) const {
  out.resize(in.size());
  plan_->forward(in.data(), out.data());
}

void SpectralOps::inverse(const ComplexArray& in, ComplexArray& out) const {
  out.resize(in.size());
  plan_->backward(in.data(), out.data());
  const double s = 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= s;
}

ComplexArray SpectralOps::laplacian(const ComplexArray& f) const {
  ComplexArray s;
  forward(f, s);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= lap_[k];
  inverse(s, s);
  return s;
}

ComplexArray SpectralOps::derivative(const ComplexArray& f, int axis) const {
  ComplexArray s;
  forward(f, s);
  for_each_frequency([&](std::size_t k, double vx, double vy, double vz) {
    const double v[3] = {vx, vy, vz};
    s[k] *= kI * v[axis];
  });
  inverse(s, s);
  return s;
}

ComplexArray SpectralOps::lz(const ComplexArray& f) const {
  const ComplexArray dx = derivative(f, 0);
  const ComplexArray dy = derivative(f, 1);
  ComplexArray out(f.size());
  for_each_point([&](std::size_t k, double x, double y, double) { out[k] = -kI * (x * dy[k] - y * dx[k]); });
  return out;
}

ComplexArray SpectralOps::soc(const ComplexArray& f, SocOperator which) const {
  ComplexArray s;
  forward(f, s);
  for_each_frequency([&](std::size_t k, double vx, double vy, double) { s[k] *= soc_symbol(which, vx, vy); });
  inverse(s, s);
  return s;
}

double SpectralOps::kinetic_from_spectrum(const ComplexArray& spectrum) const {
  const double sum = detail::pairwise_reduce<double>(0, spectrum.size(), [&](std::size_t k) {
    return -lap_[k] * std::norm(spectrum[k]);
  });
  return 0.5 * grid_.cell_volume() * sum / static_cast<double>(spectrum.size());
}

SpinorField apply_laplacian(const SpinorField& field) {
  const SpectralOps ops(field.grid());
  SpinorField out(field.grid());
  for (int c = 0; c < 3; ++c) out[c] = ops.laplacian(field[c]);
  return out;
}

SpinorField apply_lz(const SpinorField& field) {
  const SpectralOps ops(field.grid());
  SpinorField out(field.grid());
  for (int c = 0; c < 3; ++c) out[c] = ops.lz(field[c]);
  return out;
}

SpinorField apply_soc(const SpinorField& field, SocOperator which) {
  const SpectralOps ops(field.grid());
  SpinorField out(field.grid());
  for (int c = 0; c < 3; ++c) out[c] = ops.soc(field[c], which);
  return out;
}

ComplexArray prolongate(const ComplexArray& coarse, const GridSpec& cg, const GridSpec& fg) {
  if (cg.dim != fg.dim)
    throw Error(ErrorKind::invalid_argument, "prolongate: dimension mismatch");
  for (int a = 0; a < cg.dim; ++a) {
    if (fg.points[a] != 2 * cg.points[a])
      throw Error(ErrorKind::invalid_argument, "prolongate: fine grid must double the points on every axis");
    if (std::abs(fg.half_width[a] - cg.half_width[a]) > 1e-12 * cg.half_width[a])
      throw Error(ErrorKind::invalid_argument, "prolongate: coarse and fine domains differ");
  }
  if (coarse.size() != cg.size())
    throw Error(ErrorKind::invalid_argument, "prolongate: array size does not match the coarse grid");

  const SpectralOps cops(cg);
  ComplexArray cs;
  cops.forward(coarse, cs);

  // Per axis, each coarse bin maps to one fine bin; the Nyquist bin maps to
  // two fine bins (p = -N/2 and p = +N/2) with weight 1/2 each.
  struct Target {
    std::size_t bin[2];
    double weight[2];
    int count;
  };
  std::array<std::vector<Target>, 3> maps;
  for (int a = 0; a < 3; ++a) {
    const int nc = cg.points[a];
    const int nf = fg.points[a];
    auto& m = maps[a];
    m.resize(static_cast<std::size_t>(nc));
    for (int k = 0; k < nc; ++k) {
      Target t{};
      if (a >= cg.dim) {
        t = {{0, 0}, {1.0, 0.0}, 1};
      } else if (k < nc / 2) {
        t = {{static_cast<std::size_t>(k), 0}, {1.0, 0.0}, 1};
      } else if (k == nc / 2) {
        t = {{static_cast<std::size_t>(nf - nc / 2), static_cast<std::size_t>(nc / 2)}, {0.5, 0.5}, 2};
      } else {
        t = {{static_cast<std::size_t>(nf - (nc - k)), 0}, {1.0, 0.0}, 1};
      }
      m[static_cast<std::size_t>(k)] = t;
    }
  }

  ComplexArray fs(fg.size(), cplx{0.0, 0.0});
  const double scale = static_cast<double>(fg.size()) / static_cast<double>(cg.size());
  const std::size_t cNy = static_cast<std::size_t>(cg.points[1]), cNz = static_cast<std::size_t>(cg.points[2]);
  const std::size_t fNy = static_cast<std::size_t>(fg.points[1]), fNz = static_cast<std::size_t>(fg.points[2]);
  for (std::size_t i = 0; i < static_cast<std::size_t>(cg.points[0]); ++i)
    for (std::size_t j = 0; j < cNy; ++j)
      for (std::size_t l = 0; l < cNz; ++l) {
        const cplx v = cs[(i * cNy + j) * cNz + l] * scale;
        const Target& tx = maps[0][i];
        const Target& ty = maps[1][j];
        const Target& tz = maps[2][l];
        for (int a = 0; a < tx.count; ++a)
          for (int b = 0; b < ty.count; ++b)
            for (int c = 0; c < tz.count; ++c) {
              const double w = tx.weight[a] * ty.weight[b] * tz.weight[c];
              fs[(tx.bin[a] * fNy + ty.bin[b]) * fNz + tz.bin[c]] += w * v;
            }
      }

  const SpectralOps fops(fg);
  fops.inverse(fs, fs);
  return fs;
}

SpinorField prolongate(const SpinorField& field, const GridSpec& fine) {
  SpinorField out(fine);
  for (int c = 0; c < 3; ++c) out[c] = prolongate(field[c], field.grid(), fine);
  return out;
}

}  // namespace spgs
