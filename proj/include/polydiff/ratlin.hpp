// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "polydiff/types.hpp"

namespace polydiff::ratlin {

// Dense exact linear algebra over the rationals. Sizes here are tiny
// (ambient dimension <= 4, at most a dozen rows), so plain Gaussian
// elimination with exact pivots is all we need.

// In-place reduced row echelon form. Returns the pivot column of each
// pivot row; the number of pivots is the rank.
inline std::vector<int> rref(MatQ& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i) {
      if (m[i][c] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    const Rat inv = m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] /= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rat factor = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(MatQ m) { return static_cast<int>(rref(m).size()); }

// Solves the square system a x = b. Returns nullopt when a is singular.
inline std::optional<VecQ> solve_square(MatQ a, VecQ b) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
  const std::vector<int> pivots = rref(a);
  if (static_cast<int>(pivots.size()) != n) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    if (pivots[i] != i) return std::nullopt;  // pivot in the rhs column
  }
  VecQ x(n);
  for (int i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

// Indices of a maximal linearly independent subset of the given rows,
// scanned in order.
inline std::vector<int> independent_rows(const MatQ& rows) {
  std::vector<int> keep;
  MatQ basis;
  int current_rank = 0;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    basis.push_back(rows[i]);
    const int r = rank(basis);
    if (r > current_rank) {
      current_rank = r;
      keep.push_back(i);
    } else {
      basis.pop_back();
    }
  }
  return keep;
}

}  // namespace polydiff::ratlin
