#include "fft.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace spgs {

namespace {

// The FFTW planner (creation and destruction) is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const cplx* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace

FftPlan::FftPlan(const GridSpec& grid) {
  int dims[3];
  const int rank = grid.dim;
  for (int a = 0; a < rank; ++a) dims[a] = grid.points[a];
  const std::size_t n = grid.size();

  ComplexArray a(n), b(n);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE;
  fwd_out_ = fftw_plan_dft(rank, dims, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  bwd_out_ = fftw_plan_dft(rank, dims, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  fwd_in_ = fftw_plan_dft(rank, dims, as_fftw(a.data()), as_fftw(a.data()), FFTW_FORWARD, flags);
  bwd_in_ = fftw_plan_dft(rank, dims, as_fftw(a.data()), as_fftw(a.data()), FFTW_BACKWARD, flags);
  if (!fwd_out_ || !bwd_out_ || !fwd_in_ || !bwd_in_) throw std::runtime_error("FFTW plan creation failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  for (fftw_plan p : {fwd_out_, bwd_out_, fwd_in_, bwd_in_})
    if (p) fftw_destroy_plan(p);
}

void FftPlan::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(in == out ? fwd_in_ : fwd_out_, as_fftw(in), as_fftw(out));
}

void FftPlan::backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(in == out ? bwd_in_ : bwd_out_, as_fftw(in), as_fftw(out));
}

std::shared_ptr<const FftPlan> FftPlan::for_grid(const GridSpec& grid) {
  using Key = std::array<int, 4>;
  static std::mutex cache_mutex;
  static std::map<Key, std::weak_ptr<const FftPlan>> cache;

  const Key key{grid.dim, grid.points[0], grid.points[1], grid.points[2]};
  std::lock_guard lock(cache_mutex);
  if (auto it = cache.find(key); it != cache.end())
    if (auto sp = it->second.lock()) return sp;
  auto sp = std::make_shared<const FftPlan>(grid);
  cache[key] = sp;
  return sp;
}

}  // namespace spgs
