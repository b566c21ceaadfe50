// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "polydiff/types.hpp"

namespace polydiff {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat value;  // objective at the optimum (Optimal only)
  VecQ x;     // an optimal point (Optimal only)
};

// Maximizes c.x subject to A x <= b over free x, in exact rational
// arithmetic (dictionary simplex, Bland's rule, so termination is
// guaranteed). Equality constraints are passed as opposing row pairs.
LpResult lp_maximize(const MatQ& A, const VecQ& b, const VecQ& c);

}  // namespace polydiff
