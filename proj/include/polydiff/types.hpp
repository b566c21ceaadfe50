// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace polydiff {

// Exact arithmetic is used for all face-lattice combinatorics; 64-bit floats
// for the dynamics (field evaluation, inversion, norm scans).
using Rat = boost::multiprecision::cpp_rational;
using VecQ = std::vector<Rat>;
using MatQ = std::vector<VecQ>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerances. All are absolute.
inline constexpr double kTolActive = 1e-9;  // active-set band for float points
inline constexpr double kTolStrat = 1e-10;  // float-mode stratification check
inline constexpr double kTolProj = 1e-12;   // projection stopping displacement
inline constexpr double kTolInv = 1e-10;    // inversion stopping bound
inline constexpr int kProjMaxSweeps = 10000;

// Parses "p/q" or "p" (q > 0 after normalization). Throws Error(Parse).
Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& r);

inline double to_double(const Rat& r) { return static_cast<double>(r); }

// Exact: every IEEE double is a dyadic rational.
inline Rat rat_from_double(double x) { return Rat(x); }

Vec to_vec(const VecQ& q);
VecQ to_vecq(const Vec& v);

Rat dot(const VecQ& a, const VecQ& b);

}  // namespace polydiff
