#pragma once

#include <memory>
#include <span>

#include "spgs/field.hpp"
#include "spgs/grid.hpp"

namespace spgs {

class FftPlan;

enum class SocOperator { L0, L1 };

/// Fourier-spectral operators on a periodic grid.
///
/// Frequencies follow the DFT bin layout; bin k on an axis with N points
/// carries p = k for k < N/2 and p = k - N otherwise, so the Nyquist bin
/// holds p = -N/2 and wavenumber v = pi p / L.
class SpectralOps {
 public:
  explicit SpectralOps(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  /// Wavenumbers per DFT bin along an axis (zeros for inactive axes).
  std::span<const double> wavenumbers(int axis) const { return wave_[static_cast<std::size_t>(axis)]; }
  std::span<const double> coordinates(int axis) const { return coord_[static_cast<std::size_t>(axis)]; }

  /// -|v|^2 per flattened frequency index.
  const RealArray& laplacian_symbol() const { return lap_; }

  /// (-v_x + i v_y) for L0 and -(v_x + i v_y) for L1 at flattened frequency k.
  cplx soc_symbol(SocOperator which, std::size_t k) const;
  static cplx soc_symbol(SocOperator which, double vx, double vy) {
    return which == SocOperator::L0 ? cplx{-vx, vy} : cplx{-vx, -vy};
  }

  /// Unnormalized forward DFT. `in` and `out` may alias.
  void forward(const ComplexArray& in, ComplexArray& out) const;
  /// Inverse DFT including the 1/N factor. `in` and `out` may alias.
  void inverse(const ComplexArray& in, ComplexArray& out) const;

  ComplexArray laplacian(const ComplexArray& f) const;
  ComplexArray derivative(const ComplexArray& f, int axis) const;
  /// -i (x d_y - y d_x) computed from spectral first derivatives.
  ComplexArray lz(const ComplexArray& f) const;
  ComplexArray soc(const ComplexArray& f, SocOperator which) const;

  /// 1/2 int |grad f|^2 from the (unnormalized) spectrum by Parseval.
  double kinetic_from_spectrum(const ComplexArray& spectrum) const;

  /// Calls f(k, vx, vy, vz) for every flattened frequency index k.
  template <class F>
  void for_each_frequency(F&& f) const {
    const std::size_t Nx = nx(), Ny = ny(), Nz = nz();
    for (std::size_t i = 0; i < Nx; ++i)
      for (std::size_t j = 0; j < Ny; ++j)
        for (std::size_t l = 0; l < Nz; ++l)
          f((i * Ny + j) * Nz + l, wave_[0][i], wave_[1][j], wave_[2][l]);
  }

  /// Calls f(k, x, y, z) for every flattened grid index k.
  template <class F>
  void for_each_point(F&& f) const {
    const std::size_t Nx = nx(), Ny = ny(), Nz = nz();
    for (std::size_t i = 0; i < Nx; ++i)
      for (std::size_t j = 0; j < Ny; ++j)
        for (std::size_t l = 0; l < Nz; ++l)
          f((i * Ny + j) * Nz + l, coord_[0][i], coord_[1][j], coord_[2][l]);
  }

  /// Flattened index decomposition helpers.
  std::size_t nx() const { return static_cast<std::size_t>(grid_.points[0]); }
  std::size_t ny() const { return static_cast<std::size_t>(grid_.points[1]); }
  std::size_t nz() const { return static_cast<std::size_t>(grid_.points[2]); }

 private:
  GridSpec grid_;
  std::shared_ptr<const FftPlan> plan_;
  std::array<RealArray, 3> wave_;
  std::array<RealArray, 3> coord_;
  RealArray lap_;
};

SpinorField apply_laplacian(const SpinorField& field);
SpinorField apply_lz(const SpinorField& field);
SpinorField apply_soc(const SpinorField& field, SocOperator which);

/// Trigonometric interpolation onto a grid with the same domain and twice the points per axis.
/// The coarse Nyquist coefficient is split evenly between +N/2 and -N/2.
ComplexArray prolongate(const ComplexArray& coarse, const GridSpec& coarse_grid, const GridSpec& fine_grid);
SpinorField prolongate(const SpinorField& field, const GridSpec& fine);

}  // namespace spgs
