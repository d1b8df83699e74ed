#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "spgs/field.hpp"
#include "spgs/grid.hpp"

namespace testutil {

using spgs::cplx;

inline spgs::ComplexArray sample(const spgs::GridSpec& g, const std::function<cplx(double, double, double)>& f) {
  spgs::ComplexArray out(g.size());
  for (int i = 0; i < g.points[0]; ++i)
    for (int j = 0; j < g.points[1]; ++j)
      for (int l = 0; l < g.points[2]; ++l) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = g.dim == 3 ? g.coord(2, l) : 0.0;
        out[(static_cast<std::size_t>(i) * g.points[1] + j) * g.points[2] + l] = f(x, y, z);
      }
  return out;
}

// Unit-mass harmonic ground state pi^{-d/4} exp(-|x|^2/2).
inline spgs::ComplexArray gaussian(const spgs::GridSpec& g) {
  const double c = std::pow(std::numbers::pi, -g.dim / 4.0);
  return sample(g, [&](double x, double y, double z) { return cplx{c * std::exp(-(x * x + y * y + z * z) / 2), 0.0}; });
}

inline spgs::SpinorField spinor(const spgs::GridSpec& g, const spgs::ComplexArray& a, cplx w1, cplx w0, cplx wm) {
  spgs::SpinorField f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    f[spgs::kPlus][k] = w1 * a[k];
    f[spgs::kZero][k] = w0 * a[k];
    f[spgs::kMinus][k] = wm * a[k];
  }
  return f;
}

inline spgs::SpinorField random_field(const spgs::GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  spgs::SpinorField f(g);
  for (int c = 0; c < 3; ++c)
    for (auto& v : f[c]) v = {nd(rng), nd(rng)};
  return f;
}

// Random field times a Gaussian envelope, so it decays to rounding at the boundary.
inline spgs::SpinorField random_smooth(const spgs::GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  spgs::SpinorField f(g);
  for (int c = 0; c < 3; ++c) {
    const double ax = u(rng), ay = u(rng), b = u(rng), ph = 3.0 * u(rng), s = 0.6 + 0.3 * u(rng);
    f[c] = sample(g, [&](double x, double y, double z) {
      const double env = std::exp(-s * (x * x + y * y + z * z) / 2);
      return env * cplx{1.0 + ax * x + b * x * y, ay * y} * std::polar(1.0, ph);
    });
  }
  return f;
}

inline double max_abs_diff(const spgs::ComplexArray& a, const spgs::ComplexArray& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
