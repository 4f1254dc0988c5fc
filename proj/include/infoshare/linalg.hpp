#pragma once

// Small dense linear-algebra helpers shared by the condition checks and the
// polytope code. Templated on the scalar so tests can run the same routine on
// exact rationals.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "infoshare/errors.hpp"

namespace infoshare {

template <class T>
using DenseRows = std::vector<std::vector<T>>;

namespace detail {
template <class T>
T abs_value(const T& x) {
  return x < T(0) ? -x : x;
}
}  // namespace detail

/// Rank by Gaussian elimination with partial pivoting. A pivot counts iff its
/// magnitude exceeds `rel_tol * max|a_ij|` of the input. With `rel_tol == 0`
/// and an exact scalar this is the exact rank.
template <class T>
int row_reduce_rank(DenseRows<T> a, const T& rel_tol) {
  if (a.empty() || a.front().empty()) throw DomainError("rank of an empty matrix");
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  for (const auto& row : a) {
    if (row.size() != cols) throw DomainError("ragged matrix");
  }

  T scale(0);
  for (const auto& row : a) {
    for (const auto& v : row) scale = std::max(scale, detail::abs_value(v));
  }
  if (scale == T(0)) return 0;
  const T threshold = rel_tol * scale;

  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
    std::size_t best = pivot_row;
    T best_mag = detail::abs_value(a[pivot_row][c]);
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      T mag = detail::abs_value(a[r][c]);
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    if (!(best_mag > threshold)) continue;
    std::swap(a[pivot_row], a[best]);
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      if (a[r][c] == T(0)) continue;
      const T factor = a[r][c] / a[pivot_row][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= factor * a[pivot_row][k];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

}  // namespace infoshare
