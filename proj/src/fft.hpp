#pragma once

#include <fftw3.h>

#include <memory>

#include "spgs/field.hpp"
#include "spgs/grid.hpp"

namespace spgs {

/// FFTW plans for one grid shape. Plans are created with FFTW_ESTIMATE so the
/// chosen algorithm, and with it every rounding pattern, is reproducible run to run.
class FftPlan {
 public:
  explicit FftPlan(const GridSpec& grid);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;  // unnormalized

  /// Shared plan for the grid's shape; thread-safe.
  static std::shared_ptr<const FftPlan> for_grid(const GridSpec& grid);

 private:
  fftw_plan fwd_out_ = nullptr;
  fftw_plan bwd_out_ = nullptr;
  fftw_plan fwd_in_ = nullptr;
  fftw_plan bwd_in_ = nullptr;
};

}  // namespace spgs
