// SPDX-License-Identifier: Apache-2.0

#include "polydiff/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace polydiff {
namespace {

// Dictionary representation:
//   x_basic[i] = rhs[i] - sum_j tab[i][j] * x_nonbasic[j]
//   z          = obj0   + sum_j obj[j]   * x_nonbasic[j]
// Variable ids: 0..nv-1 structural (split free vars), nv..nv+m-1 slacks,
// nv+m the phase-1 auxiliary.
struct Dictionary {
  int m = 0;
  std::vector<int> basic;
  std::vector<int> nonbasic;
  std::vector<VecQ> tab;
  VecQ rhs;
  VecQ obj;
  Rat obj0;

  void pivot(int row, int col) {
    const Rat piv = tab[row][col];
    const int cols = static_cast<int>(nonbasic.size());

    // Express the entering variable through the leaving one.
    VecQ new_row(cols);
    for (int j = 0; j < cols; ++j) new_row[j] = tab[row][j] / piv;
    new_row[col] = Rat(1) / piv;
    const Rat new_rhs = rhs[row] / piv;

    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const Rat factor = tab[i][col];
      if (factor == 0) continue;
      rhs[i] -= factor * new_rhs;
      for (int j = 0; j < cols; ++j) {
        if (j == col) continue;
        tab[i][j] -= factor * new_row[j];
      }
      tab[i][col] = -factor / piv;
    }
    const Rat ofac = obj[col];
    if (ofac != 0) {
      obj0 += ofac * new_rhs;
      for (int j = 0; j < cols; ++j) {
        if (j == col) continue;
        obj[j] -= ofac * new_row[j];
      }
      obj[col] = -ofac / piv;
    }
    tab[row] = std::move(new_row);
    rhs[row] = new_rhs;
    std::swap(basic[row], nonbasic[col]);
  }

  // Bland's rule: entering = smallest-id improving variable, leaving =
  // smallest-id among minimum-ratio rows. Returns false on unboundedness.
  bool optimize() {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < static_cast<int>(nonbasic.size()); ++j) {
        if (obj[j] > 0 && (enter < 0 || nonbasic[j] < nonbasic[enter])) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      Rat best_ratio;
      for (int i = 0; i < m; ++i) {
        if (tab[i][enter] <= 0) continue;
        const Rat ratio = rhs[i] / tab[i][enter];
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basic[i] < basic[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult lp_maximize(const MatQ& A, const VecQ& b, const VecQ& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  if (m == 0) throw std::logic_error("lp_maximize: no constraints");

  // Split each free variable: x_k = u_k - w_k with u, w >= 0.
  const int nv = 2 * n;
  Dictionary d;
  d.m = m;
  d.basic.resize(m);
  d.nonbasic.resize(nv);
  d.tab.assign(m, VecQ(nv));
  d.rhs = b;
  for (int j = 0; j < nv; ++j) d.nonbasic[j] = j;
  for (int i = 0; i < m; ++i) {
    d.basic[i] = nv + i;
    for (int k = 0; k < n; ++k) {
      d.tab[i][2 * k] = A[i][k];
      d.tab[i][2 * k + 1] = -A[i][k];
    }
  }

  // Phase 1 when some rhs is negative.
  bool need_phase1 = false;
  int worst = 0;
  for (int i = 0; i < m; ++i) {
    if (d.rhs[i] < 0) need_phase1 = true;
    if (d.rhs[i] < d.rhs[worst]) worst = i;
  }
  if (need_phase1) {
    const int aux_id = nv + m;
    for (int i = 0; i < m; ++i) d.tab[i].push_back(Rat(-1));
    d.nonbasic.push_back(aux_id);
    d.obj.assign(d.nonbasic.size(), Rat(0));
    d.obj.back() = Rat(-1);
    d.obj0 = 0;
    d.pivot(worst, static_cast<int>(d.nonbasic.size()) - 1);
    if (!d.optimize()) throw std::logic_error("lp_maximize: phase 1 unbounded");
    if (d.obj0 < 0) return LpResult{LpStatus::Infeasible, Rat(0), {}};

    // Drive the auxiliary out of the basis if it sits there at level 0.
    for (int i = 0; i < m; ++i) {
      if (d.basic[i] != aux_id) continue;
      int col = -1;
      for (int j = 0; j < static_cast<int>(d.nonbasic.size()); ++j) {
        if (d.tab[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col < 0) {
        // Redundant row: the auxiliary is identically zero here.
        d.tab.erase(d.tab.begin() + i);
        d.rhs.erase(d.rhs.begin() + i);
        d.basic.erase(d.basic.begin() + i);
        --d.m;
      } else {
        d.pivot(i, col);
      }
      break;
    }
    // Remove the auxiliary column.
    for (int j = 0; j < static_cast<int>(d.nonbasic.size()); ++j) {
      if (d.nonbasic[j] != aux_id) continue;
      d.nonbasic.erase(d.nonbasic.begin() + j);
      for (auto& row : d.tab) row.erase(row.begin() + j);
      break;
    }
    d.m = static_cast<int>(d.tab.size());
  }

  // Install the real objective, substituting basic variables.
  d.obj.assign(d.nonbasic.size(), Rat(0));
  d.obj0 = 0;
  auto structural_coef = [&](int id) -> Rat {
    if (id >= nv) return Rat(0);
    const Rat coef = c[id / 2];
    return (id % 2 == 0) ? coef : -coef;
  };
  for (int j = 0; j < static_cast<int>(d.nonbasic.size()); ++j)
    d.obj[j] += structural_coef(d.nonbasic[j]);
  for (int i = 0; i < d.m; ++i) {
    const Rat coef = structural_coef(d.basic[i]);
    if (coef == 0) continue;
    d.obj0 += coef * d.rhs[i];
    for (int j = 0; j < static_cast<int>(d.nonbasic.size()); ++j)
      d.obj[j] -= coef * d.tab[i][j];
  }

  if (!d.optimize()) return LpResult{LpStatus::Unbounded, Rat(0), {}};

  VecQ split(nv, Rat(0));
  for (int i = 0; i < d.m; ++i) {
    if (d.basic[i] < nv) split[d.basic[i]] = d.rhs[i];
  }
  VecQ x(n);
  for (int k = 0; k < n; ++k) x[k] = split[2 * k] - split[2 * k + 1];
  return LpResult{LpStatus::Optimal, d.obj0, std::move(x)};
}

}  // namespace polydiff
