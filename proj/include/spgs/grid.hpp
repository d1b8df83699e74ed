#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

namespace spgs {

/// Uniform periodic tensor grid on [-L_x, L_x) x [-L_y, L_y) [x [-L_z, L_z)].
///
/// Unused trailing axes (the z axis in 2D) carry points = 1 and half_width = 0
/// so that flattened loops can always run over three nested indices.
/// Storage order is row-major with x slowest: k = (ix * Ny + iy) * Nz + iz.
struct GridSpec {
  int dim = 2;
  std::array<double, 3> half_width{0.0, 0.0, 0.0};
  std::array<int, 3> points{1, 1, 1};

  double h(int axis) const { return 2.0 * half_width[axis] / points[axis]; }
  double coord(int axis, int m) const { return -half_width[axis] + m * h(axis); }

  std::size_t size() const {
    return static_cast<std::size_t>(points[0]) * static_cast<std::size_t>(points[1]) *
           static_cast<std::size_t>(points[2]);
  }

  /// Quadrature weight h_x h_y [h_z].
  double cell_volume() const;

  /// Same domain with every active axis doubled.
  GridSpec refined() const;

  std::string describe() const;

  bool operator==(const GridSpec&) const = default;
};

/// Validating constructor: dim in {2,3}, each N even and >= 4, each L > 0.
GridSpec make_grid(int dim, std::span<const double> half_widths, std::span<const int> points);

/// Uniform isotropic convenience overload.
GridSpec make_grid(int dim, double half_width, int points);

}  // namespace spgs
