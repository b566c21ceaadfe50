// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <random>

#include "polydiff/fields.hpp"
#include "polydiff/polytope.hpp"

namespace polydiff::testing {

// Families of random stratified polynomial fields. The term structure keeps
// every stored coefficient a single signed product of one random double, so
// the exact symbolic stratification identities survive arbitrary rescaling.
enum class Family { Box, Triangle };

// Degree <= 3, symbolically stratified on the family polytope; not scaled.
VectorField random_stratified_field(std::shared_ptr<const Polytope> P, Family family,
                                    std::mt19937_64& rng);

// Gated field scaled so the certified bound lands near target_q (< 1).
GatedField random_gated_field(std::shared_ptr<const Polytope> P, Family family,
                              double target_q, std::mt19937_64& rng);

// Field vanishing on the whole boundary (id + f fixes every boundary point),
// scaled to the certified target.
GatedField random_boundary_vanishing_field(std::shared_ptr<const Polytope> P,
                                           Family family, double target_q,
                                           std::mt19937_64& rng);

inline double rand_coef(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

}  // namespace polydiff::testing
