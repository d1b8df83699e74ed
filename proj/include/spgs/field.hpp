#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <new>
#include <vector>

#include "spgs/grid.hpp"

namespace spgs {

using cplx = std::complex<double>;

/// 64-byte aligned allocator so FFT plans can execute directly on field storage.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexArray = std::vector<cplx, AlignedAllocator<cplx>>;
using RealArray = std::vector<double>;

/// Component slots of a spin-1 wave function, ordered (phi_1, phi_0, phi_-1).
enum Component : int { kPlus = 0, kZero = 1, kMinus = 2 };

/// Three complex scalar fields on one grid; the discrete spin-1 wave function.
class SpinorField {
 public:
  SpinorField() = default;
  explicit SpinorField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t points() const { return grid_.size(); }

  ComplexArray& operator[](int c) { return comp_[static_cast<std::size_t>(c)]; }
  const ComplexArray& operator[](int c) const { return comp_[static_cast<std::size_t>(c)]; }

  bool all_finite() const;

  SpinorField& operator+=(const SpinorField& o);
  SpinorField& operator-=(const SpinorField& o);
  SpinorField& operator*=(cplx s);
  SpinorField& operator*=(double s);

  /// this += a * x
  void axpy(cplx a, const SpinorField& x);
  void axpy(double a, const SpinorField& x);

  /// this = a * x + b * y (grids must agree)
  static SpinorField combine(double a, const SpinorField& x, double b, const SpinorField& y);

  void set_zero();

 private:
  GridSpec grid_{};
  std::array<ComplexArray, 3> comp_{};
};

SpinorField operator+(SpinorField a, const SpinorField& b);
SpinorField operator-(SpinorField a, const SpinorField& b);
SpinorField operator*(cplx s, SpinorField a);
SpinorField operator*(double s, SpinorField a);

/// h^d * sum over points and components of a_l * conj(b_l).
cplx inner_product(const SpinorField& a, const SpinorField& b);

/// Re<a, b>, the real inner product used by the manifold geometry.
double real_inner(const SpinorField& a, const SpinorField& b);

double norm(const SpinorField& f);

/// Joint unit normalization over the three components; throws degenerate-input for a zero field.
SpinorField normalize(const SpinorField& f);

/// max over components and points of |f_l(x)|.
double sup_norm(const SpinorField& f);

/// max over components of ||a_l - b_l||_inf.
double sup_diff(const SpinorField& a, const SpinorField& b);

/// Discrete mass h^d sum |c|^2 of a single component.
double component_mass(const GridSpec& grid, const ComplexArray& c);

/// Pointwise total density rho = sum_l |phi_l|^2.
RealArray total_density(const SpinorField& f);

/// Throws invalid-argument when grids differ.
void require_same_grid(const SpinorField& a, const SpinorField& b, const char* what);

/// Pairwise sum of n doubles.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace spgs
