// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "polydiff/diffeo.hpp"
#include "polydiff/fields.hpp"
#include "polydiff/polytope.hpp"

namespace polydiff {

// --- Tangent rays stay in the polytope -------------------------------------

struct DerToFaceReport {
  double epsilon = 0;  // all sampled t in [0, epsilon] keep x0 + t v inside M
  int curve_samples = 0;
  bool pass = false;
};

// For the quadratic curve t -> x0 + t v + t^2 w staying in M on [0, t_max],
// finds eps > 0 with x0 + t v in M for sampled t in [0, eps] (decreasing
// scan). Throws Error(CurveNotInM) when the curve precondition fails.
DerToFaceReport check_der_to_face(const Polytope& P, const Vec& x0, const Vec& v,
                                  const Vec& w, double t_max, double tol = kTolActive);

// --- Derivatives map tangent spans onto tangent spans -----------------------

struct FaceIntoFaceReport {
  bool pass = false;
  int faces_checked = 0;
  long points_checked = 0;
  double max_inclusion_residual = 0;  // distance of J u from Span E(phi(x))
  std::optional<std::string> first_failure;
};

// Inclusion: J(x) E(x) lies inside E(phi(x)). Spanning: for the admitted
// diffeomorphism the image fills E(phi(x)) (dimension match + rank check).
FaceIntoFaceReport check_face_into_face(const Diffeo& d, int samples_per_face,
                                        std::uint64_t seed = 42, double tol = 1e-8);

// --- Lipschitz bound for the inverse ---------------------------------------

struct LipInverseReport {
  double q = 0;
  double bound = 0;          // 1/(1-q) + slack
  double empirical_max = 0;  // max ratio |x-y| / |phi(x)-phi(y)| over pairs
  int pairs = 0;
  bool pass = false;
};

// Measures Lip(phi^{-1}) on image pairs a = phi(x), b = phi(y), so the
// inverse is evaluated exactly where it is defined. q must be a Lipschitz
// bound for f with q < 1; f need not be stratified (the lemma does not
// require it).
LipInverseReport check_lip_inverse(const VectorField& f, double q, int pairs,
                                   std::uint64_t seed = 42, double slack = 1e-6);

// --- Local-addition falsifier ------------------------------------------------

// A closed-form candidate tau(x, y) on the inner tangent set of M = [0,inf[
// (or [0,1]): {(x,y) : x = 0 => y >= 0} near the origin.
struct LocalAdditionCandidate {
  PolyD tau;  // polynomial in (x, y)
  double domain_radius = std::numeric_limits<double>::infinity();
  std::string description;
};

enum class FailureMode { A2Violated, A1JacobianSingular, LeavesM };

constexpr const char* failure_mode_name(FailureMode m) {
  switch (m) {
    case FailureMode::A2Violated: return "A2_violated";
    case FailureMode::A1JacobianSingular: return "A1_jacobian_singular";
    case FailureMode::LeavesM: return "leaves_M";
  }
  return "unknown";
}

struct FalsificationWitness {
  FailureMode failure_mode = FailureMode::LeavesM;
  double theta = 0;
  double t = 0;
  double h_value = 0;  // tau(t, -theta t) < 0 for leaves_M
  double dtau_dy = 0;  // one-sided partial at the corner
  std::string detail;
};

// Executes the non-existence argument as an algorithm: checks tau(x,0) = x on
// samples, takes the one-sided partial d tau/d y at (0,0), and either reports
// a singular Jacobian or scans h(t) = tau(t, -theta t) with
// theta = 2 / (d tau/d y) down a geometric grid until h(t) < 0. Throws
// Error(NoWitnessFound) when the scan floor (t = 1e-12) is reached.
FalsificationWitness falsify_local_addition(const LocalAdditionCandidate& c);

// Corner-chart variant for M = [0,inf[^k x R^{n-k}: sigma1 is the first
// component of the candidate, a polynomial in (x_1..x_n, y_1..y_n). The scan
// runs along t (1,...,1, -theta e_j).
FalsificationWitness falsify_corner_chart(
    const PolyD& sigma1, int n, int k,
    double domain_radius = std::numeric_limits<double>::infinity());

}  // namespace polydiff
