// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "polydiff/polytope.hpp"

namespace polydiff::testing {

struct OracleFace {
  std::vector<int> active;  // full closure of the tight set, sorted
  int dim = 0;
};

// Independent brute-force face enumeration: every active-subset pattern is
// tested for feasibility with an exact LP, its tight-set closure is computed
// with per-constraint exact LPs, and duplicates are merged. Never touches
// the lattice machinery under test.
std::vector<OracleFace> enumerate_faces_bruteforce(const Polytope& P);

}  // namespace polydiff::testing
