// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "polydiff/diffeo.hpp"
#include "polydiff/polytope.hpp"

namespace polydiff::testing {

// Canonical desk-scale polytopes (lattice already built).
std::shared_ptr<const Polytope> make_interval();      // [0,1]
std::shared_ptr<const Polytope> make_unit_cube(int n);  // [0,1]^n
std::shared_ptr<const Polytope> make_square();
std::shared_ptr<const Polytope> make_triangle();     // x>=0, y>=0, x+y<=1
std::shared_ptr<const Polytope> make_octahedron();   // |x|+|y|+|z| <= 1

// Affine symmetries used across the suites.
Diffeo square_rotation(std::shared_ptr<const Polytope> square);    // (x,y)->(y,1-x)
Diffeo square_reflection(std::shared_ptr<const Polytope> square);  // (x,y)->(y,x)
Diffeo cube_rotation_z(std::shared_ptr<const Polytope> cube);      // (x,y,z)->(y,1-x,z)
Diffeo cube_axis_swap(std::shared_ptr<const Polytope> cube);       // (x,y,z)->(y,x,z)

}  // namespace polydiff::testing
