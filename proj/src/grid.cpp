#include "spgs/grid.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "spgs/error.hpp"

namespace spgs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::preconditioner_breakdown: return "preconditioner-breakdown";
    case ErrorKind::step_stalled: return "step-stalled";
    case ErrorKind::unsupported_diagnostic: return "unsupported-diagnostic";
    case ErrorKind::sweep_failed: return "sweep-failed";
    case ErrorKind::io: return "io";
    case ErrorKind::checksum: return "checksum";
    case ErrorKind::version: return "version";
  }
  return "unknown";
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= h(a);
  return v;
}

GridSpec GridSpec::refined() const {
  GridSpec fine = *this;
  for (int a = 0; a < dim; ++a) fine.points[a] *= 2;
  return fine;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << dim << "D [";
  for (int a = 0; a < dim; ++a) os << (a ? " x " : "") << points[a];
  os << "] on [";
  for (int a = 0; a < dim; ++a) os << (a ? ", " : "") << "+-" << half_width[a];
  os << "]";
  return os.str();
}

GridSpec make_grid(int dim, std::span<const double> half_widths, std::span<const int> points) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorKind::invalid_argument, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (half_widths.size() != static_cast<std::size_t>(dim) || points.size() != static_cast<std::size_t>(dim))
    throw Error(ErrorKind::invalid_argument, "grid per-axis arrays must have length equal to dim");

  GridSpec g;
  g.dim = dim;
  for (int a = 0; a < dim; ++a) {
    if (!(half_widths[a] > 0.0) || !std::isfinite(half_widths[a]))
      throw Error(ErrorKind::invalid_argument, "grid half-width must be positive on axis " + std::to_string(a));
    if (points[a] < 4 || points[a] % 2 != 0)
      throw Error(ErrorKind::invalid_argument,
                  "grid points must be even and >= 4 on axis " + std::to_string(a) + ", got " +
                      std::to_string(points[a]));
    g.half_width[a] = half_widths[a];
    g.points[a] = points[a];
  }
  return g;
}

GridSpec make_grid(int dim, double half_width, int points) {
  std::vector<double> l(static_cast<std::size_t>(std::max(dim, 0)), half_width);
  std::vector<int> n(static_cast<std::size_t>(std::max(dim, 0)), points);
  if (dim != 2 && dim != 3)
    throw Error(ErrorKind::invalid_argument, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  return make_grid(dim, l, n);
}

}  // namespace spgs
