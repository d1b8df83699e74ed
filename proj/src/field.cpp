#include "spgs/field.hpp"

#include <algorithm>
#include <cmath>

#include "reduce.hpp"
#include "spgs/error.hpp"

namespace spgs {

SpinorField::SpinorField(const GridSpec& grid) : grid_(grid) {
  for (auto& c : comp_) c.assign(grid.size(), cplx{0.0, 0.0});
}

bool SpinorField::all_finite() const {
  for (const auto& c : comp_)
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
  require_same_grid(*this, o, "operator+=");
  for (int c = 0; c < 3; ++c) {
    auto& a = comp_[c];
    const auto& b = o[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
  return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
  require_same_grid(*this, o, "operator-=");
  for (int c = 0; c < 3; ++c) {
    auto& a = comp_[c];
    const auto& b = o[c];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  }
  return *this;
}

SpinorField& SpinorField::operator*=(cplx s) {
  for (auto& c : comp_)
    for (auto& v : c) v *= s;
  return *this;
}

SpinorField& SpinorField::operator*=(double s) {
  for (auto& c : comp_)
    for (auto& v : c) v *= s;
  return *this;
}

void SpinorField::axpy(cplx a, const SpinorField& x) {
  require_same_grid(*this, x, "axpy");
  for (int c = 0; c < 3; ++c) {
    auto& y = comp_[c];
    const auto& xs = x[c];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * xs[i];
  }
}

void SpinorField::axpy(double a, const SpinorField& x) {
  require_same_grid(*this, x, "axpy");
  for (int c = 0; c < 3; ++c) {
    auto& y = comp_[c];
    const auto& xs = x[c];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * xs[i];
  }
}

SpinorField SpinorField::combine(double a, const SpinorField& x, double b, const SpinorField& y) {
  require_same_grid(x, y, "combine");
  SpinorField out(x.grid());
  for (int c = 0; c < 3; ++c) {
    auto& o = out[c];
    const auto& xs = x[c];
    const auto& ys = y[c];
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xs[i] + b * ys[i];
  }
  return out;
}

void SpinorField::set_zero() {
  for (auto& c : comp_) std::fill(c.begin(), c.end(), cplx{0.0, 0.0});
}

SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
SpinorField operator*(cplx s, SpinorField a) { return a *= s; }
SpinorField operator*(double s, SpinorField a) { return a *= s; }

void require_same_grid(const SpinorField& a, const SpinorField& b, const char* what) {
  if (!(a.grid() == b.grid()))
    throw Error(ErrorKind::invalid_argument, std::string(what) + ": grid mismatch (" + a.grid().describe() +
                                                 " vs " + b.grid().describe() + ")");
}

cplx inner_product(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a, b, "inner_product");
  cplx s{0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    const auto& x = a[c];
    const auto& y = b[c];
    s += detail::pairwise_reduce<cplx>(0, x.size(), [&](std::size_t i) { return x[i] * std::conj(y[i]); });
  }
  return s * a.grid().cell_volume();
}

double real_inner(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a, b, "real_inner");
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& x = a[c];
    const auto& y = b[c];
    s += detail::pairwise_reduce<double>(0, x.size(), [&](std::size_t i) {
      return x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    });
  }
  return s * a.grid().cell_volume();
}

double norm(const SpinorField& f) { return std::sqrt(real_inner(f, f)); }

SpinorField normalize(const SpinorField& f) {
  const double n = norm(f);
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorKind::degenerate_input, "normalize: field has zero or non-finite norm");
  SpinorField out = f;
  out *= 1.0 / n;
  return out;
}

double sup_norm(const SpinorField& f) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    for (const auto& v : f[c]) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const SpinorField& a, const SpinorField& b) {
  require_same_grid(a, b, "sup_diff");
  double m = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& x = a[c];
    const auto& y = b[c];
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

double component_mass(const GridSpec& grid, const ComplexArray& c) {
  return grid.cell_volume() * detail::pairwise_reduce<double>(0, c.size(), [&](std::size_t i) { return std::norm(c[i]); });
}

RealArray total_density(const SpinorField& f) {
  RealArray rho(f.points(), 0.0);
  for (int c = 0; c < 3; ++c) {
    const auto& x = f[c];
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += std::norm(x[i]);
  }
  return rho;
}

double pairwise_sum(const double* v, std::size_t n) {
  return detail::pairwise_reduce<double>(0, n, [v](std::size_t i) { return v[i]; });
}

}  // namespace spgs
