#pragma once

#include <cstddef>

namespace spgs::detail {

/// Pairwise reduction of term(i) for i in [begin, end). Leaves of 128 terms
/// are summed directly, which keeps the rounding error at O(log n) ulps.
template <class T, class Term>
T pairwise_reduce(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t leaf = 128;
  if (end - begin <= leaf) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_reduce<T>(begin, mid, term) + pairwise_reduce<T>(mid, end, term);
}

}  // namespace spgs::detail
