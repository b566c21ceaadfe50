// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polydiff/poly.hpp"
#include "polydiff/polytope.hpp"
#include "polydiff/types.hpp"

namespace polydiff {

struct StratViolation {
  int face_id = -1;
  Vec point;
  int constraint = -1;  // halfspace index; -1 for a symbolic identity failure
  double value = 0;
  std::string note;
};

struct StratificationReport {
  bool pass = false;
  bool symbolic = false;  // exact per-face polynomial identities were checked
  int faces_checked = 0;
  long points_checked = 0;
  std::optional<StratViolation> first_violation;
};

enum class NormMode { Exact, Certified, Estimate };

// Certified (one-sided) bound q >= sup_x |f'(x)|_op together with the
// stratification evidence. Admission to the group requires q < 1.
struct GateCertificate {
  double q = std::numeric_limits<double>::infinity();
  NormMode mode = NormMode::Estimate;
  bool stratified = false;
  Vec argmax;                                     // grid point realizing the scan max
  std::vector<std::pair<double, double>> levels;  // (mesh, bound) per refinement
  StratificationReport strat;

  bool admissible() const { return stratified && q < 1.0; }
};

// A vector field M -> E with an analytic Jacobian. Value type with shared
// immutable internals; all evaluation is pure.
class VectorField {
 public:
  enum class Kind { Affine, Polynomial, Composite, InverseChart };

  static VectorField zero(std::shared_ptr<const Polytope> P);
  static VectorField affine(std::shared_ptr<const Polytope> P, Mat A, Vec b);
  static VectorField polynomial(std::shared_ptr<const Polytope> P, std::vector<PolyD> comps);

  Kind kind() const;
  const Polytope& domain() const;
  const std::shared_ptr<const Polytope>& domain_ptr() const;

  // eval/jacobian check x in M (within tol); the _raw variants do not and are
  // used for bounding-box scans.
  Vec eval(const Vec& x, double tol = kTolActive) const;
  Mat jacobian(const Vec& x, double tol = kTolActive) const;
  Vec eval_raw(const Vec& x) const;
  Mat jacobian_raw(const Vec& x) const;

  // Affine / Polynomial only.
  VectorField scaled(double s) const;
  bool has_polynomial_form() const;
  std::vector<PolyD> as_polynomials() const;

  const Mat& affine_A() const;
  const Vec& affine_b() const;
  const std::vector<PolyD>& poly_components() const;

  const VectorField& composite_g() const;
  const VectorField& composite_f() const;
  const GateCertificate& composite_cert_g() const;
  const std::optional<GateCertificate>& composite_cert_f() const;

  const VectorField& inverse_g() const;
  const GateCertificate& inverse_cert() const;

 private:
  struct Impl;
  explicit VectorField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend VectorField rho(const struct GatedField& g, const VectorField& f);
  friend VectorField rho(const struct GatedField& g, const struct GatedField& f);
  friend VectorField inverse_chart(const struct GatedField& g);
};

// A field together with its admission certificate.
struct GatedField {
  VectorField field;
  GateCertificate cert;
};

struct SupOptions {
  double h0_fraction = 1.0 / 16;  // initial mesh: fraction of the bbox diagonal
  double stabilization = 1e-2;    // stop when the bound improves less than this
  long max_grid_points = 1000000;
  int strat_samples_per_face = 8;
  std::uint64_t seed = 42;
};

// Checks f(x) in E(x): per-face tangency at sampled algebraic-interior points
// plus every vertex; for fields in polynomial form additionally verifies, in
// exact rational arithmetic, that each active functional composed with f
// vanishes identically on the face's affine hull.
StratificationReport is_stratified(const VectorField& f, int samples_per_face,
                                   double tol = kTolStrat, std::uint64_t seed = 42);

// Upper bound for sup |f'|_op. Exact: affine spectral norm. Certified:
// refined grid max plus a derivative-slack term (sound one-sided bound);
// composites combine their children's certificates. Estimate: grid max only
// (not a bound). Also attaches stratification evidence.
GateCertificate sup_op_norm(const VectorField& f, NormMode mode, const SupOptions& opts = {});

// Runs the full admission gate; throws Error(NotStratified) or
// Error(GateNotSatisfied).
GatedField gate(const VectorField& f, const SupOptions& opts = {});

// rho_g(f) = g + f o (id + g); requires an admissible certificate for g.
VectorField rho(const GatedField& g, const VectorField& f);
VectorField rho(const GatedField& g, const GatedField& f);  // keeps f's certificate

// The field (id + g)^{-1} - id, evaluated by fixed-point inversion.
VectorField inverse_chart(const GatedField& g);

// Solves x + f(x) = y for y in M by projected Banach iteration with
// contraction factor q; throws Error(InversionNotConverged) at the cap.
Vec solve_near_identity(const VectorField& f, double q, const Vec& y,
                        double tol_inv = kTolInv);

}  // namespace polydiff
