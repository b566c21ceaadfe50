// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "polydiff/fields.hpp"
#include "polydiff/polytope.hpp"

namespace polydiff {

// Permutation of the face lattice induced by a diffeomorphism. Dimension
// preserving by construction; near-identity words induce the identity.
class FacePermutation {
 public:
  explicit FacePermutation(std::vector<int> perm) : perm_(std::move(perm)) {}
  static FacePermutation identity(int n_faces);

  int size() const { return static_cast<int>(perm_.size()); }
  int operator()(int face_id) const { return perm_[face_id]; }
  bool is_identity() const;
  FacePermutation after(const FacePermutation& inner) const;  // this o inner
  FacePermutation inverse() const;
  bool operator==(const FacePermutation&) const = default;

  // Nontrivial cycles, each rotated to start at its smallest element.
  std::vector<std::vector<int>> cycles() const;

 private:
  std::vector<int> perm_;
};

// An element of the diffeomorphism group, represented as a word of letters:
// gated near-identity generators id+f, their inverses, and affine symmetries
// of the polytope. Letters apply right to left.
class Diffeo {
 public:
  struct Letter {
    enum class Kind { NearIdentity, InverseNearIdentity, AffineSymmetry };
    Kind kind = Kind::NearIdentity;
    std::shared_ptr<const GatedField> gated;  // near-identity payload
    Mat L, L_inv;                             // affine payload
    Vec t, t_inv;
  };

  static Diffeo identity(std::shared_ptr<const Polytope> P);

  // Admission via the operator-norm gate: runs is_stratified and
  // sup_op_norm; throws Error(NotStratified) / Error(GateNotSatisfied).
  // Rejection never asserts "not a diffeomorphism" (the gate is sufficient,
  // not necessary).
  static Diffeo try_near_identity(const VectorField& f, const SupOptions& opts = {});
  static Diffeo near_identity(GatedField gf);

  // x -> L x + t; verified to permute the vertex set exactly. Throws
  // Error(NotASymmetry).
  static Diffeo affine_symmetry(const Mat& L, const Vec& t,
                                std::shared_ptr<const Polytope> P,
                                double tol = kTolActive);

  const Polytope& domain() const { return *domain_; }
  const std::shared_ptr<const Polytope>& domain_ptr() const { return domain_; }
  const std::vector<Letter>& word() const { return word_; }

  Vec eval(const Vec& x, double tol_inv = kTolInv) const;
  Mat jacobian(const Vec& x, double tol_inv = kTolInv) const;
  // Jacobian of the inverse map at x, via (phi^{-1})' = inv o phi' o phi^{-1}.
  Mat inverse_jacobian(const Vec& x, double tol_inv = kTolInv) const;

  Diffeo compose(const Diffeo& rhs) const;  // this o rhs
  Diffeo inverse() const;

  // The chart value phi - id of a single near-identity letter.
  const GatedField& chart() const;

  FacePermutation face_permutation(double tol = kTolActive, double tol_inv = kTolInv) const;

  bool is_boundary_fixing(int samples_per_face, std::uint64_t seed = 42,
                          double tol = kTolActive) const;

 private:
  Diffeo(std::shared_ptr<const Polytope> P, std::vector<Letter> word)
      : domain_(std::move(P)), word_(std::move(word)) {}

  std::shared_ptr<const Polytope> domain_;
  std::vector<Letter> word_;
};

Diffeo conjugate(const Diffeo& psi, const Diffeo& phi);  // psi o phi o psi^{-1}

// Chart-level product H(f,g) = (id+f) o (id+g) - id = rho_g(f).
VectorField chart_product(const GatedField& f, const GatedField& g);

// Solves x + f(x) = y (preimage under id+f) for a gated field.
Vec invert_point(const GatedField& f, const Vec& y, double tol_inv = kTolInv);

}  // namespace polydiff
