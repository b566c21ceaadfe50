// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "polydiff/types.hpp"

namespace polydiff {

// One inequality <a, x> <= b with exact rational data.
struct Halfspace {
  VecQ normal;
  Rat offset;
};

// A non-empty face of the polytope. `active` is the full set of constraints
// tight on the face, `basis` spans E(x) = Span(M(x) - x) for x in the
// algebraic interior, and `witness` is the vertex barycenter (which lies in
// the algebraic interior).
struct Face {
  std::vector<int> active;
  int dim = 0;
  std::vector<int> vertices;
  MatQ basis;
  VecQ witness;
  Vec witness_d;
  Mat basis_d;  // dim x n, rows
};

// All non-empty faces of M, including M itself, closed under intersection.
class FaceLattice {
 public:
  int n_faces() const { return static_cast<int>(faces_.size()); }
  const Face& face(int id) const { return faces_[id]; }
  int top() const { return top_; }
  int ambient_dim() const { return ambient_dim_; }
  const std::vector<int>& faces_of_dim(int d) const { return by_dim_[d]; }

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  const VecQ& vertex(int vi) const { return vertices_[vi]; }
  const Vec& vertex_d(int vi) const { return vertices_d_[vi]; }

  // Face id for a sorted vertex-id set; -1 when absent.
  int face_by_vertices(const std::vector<int>& sorted_vertex_ids) const;

  // Containment in the partial order (vertex-set inclusion).
  bool face_contains(int super, int sub) const;

  // Vertices lying on halfspace i (sorted vertex ids).
  const std::vector<int>& facet_vertices(int i) const { return facet_vertices_[i]; }

 private:
  friend class Polytope;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> by_dim_;
  std::vector<VecQ> vertices_;
  std::vector<Vec> vertices_d_;
  std::vector<std::vector<int>> facet_vertices_;
  int top_ = -1;
  int ambient_dim_ = 0;
};

// A convex polytope in R^n with non-empty interior, in halfspace form.
// Immutable after construction; all operations are const and pure.
class Polytope {
 public:
  // Validates boundedness and non-empty interior (exact LPs); throws
  // Error(EmptyInterior) / Error(Unbounded). The result is not canonical
  // and carries no face lattice yet.
  static std::shared_ptr<const Polytope> make(int dim, std::vector<Halfspace> hs);

  // Equivalent polytope with every redundant halfspace removed and the face
  // lattice built. Returns this object when already canonical.
  std::shared_ptr<const Polytope> canonicalize() const;

  int dim() const { return n_; }
  bool is_canonical() const { return canonical_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }
  const FaceLattice& lattice() const;

  bool contains(const Vec& x, double tol) const;
  bool contains_exact(const VecQ& x) const;

  // Constraints within `tol` of tight at x (distance scale: unit normals).
  // Throws Error(NotInPolytope) when x violates some constraint beyond tol.
  std::vector<int> active_set(const Vec& x, double tol) const;
  std::vector<int> active_set_exact(const VecQ& x) const;

  int smallest_face_id(const Vec& x, double tol = kTolActive) const;
  int smallest_face_id_exact(const VecQ& x) const;
  const Face& smallest_face(const Vec& x, double tol = kTolActive) const {
    return lattice().face(smallest_face_id(x, tol));
  }

  // Index of x: n - dim M(x).
  int index(const Vec& x, double tol = kTolActive) const;
  int index_exact(const VecQ& x) const;

  // Ids of all faces of dimension n - i (the closures of the stratum
  // partial_i(M) components).
  std::vector<int> stratum(int i) const;

  // Euclidean nearest point of M by cyclic Dykstra projection onto the
  // halfspaces. Throws Error(ProjectionNotConverged) at the sweep cap.
  Vec project(const Vec& x, double tol = kTolProj, int max_sweeps = kProjMaxSweeps) const;

  // Deterministic pseudorandom points in the algebraic interior of a face:
  // convex combinations of its vertices with strictly positive weights.
  std::vector<Vec> sample(int face_id, int count, std::uint64_t seed) const;

  // Float-side cached copies with unit normals (rows of `unit_normals`).
  const Mat& unit_normals() const { return unit_normals_; }
  const Vec& unit_offsets() const { return unit_offsets_; }

  std::pair<Vec, Vec> bounding_box() const;
  const std::vector<Vec>& vertices_d() const { return lattice().vertices_d_; }

  // Same halfspace data (used for domain checks across modules).
  bool same_as(const Polytope& other) const;

 private:
  Polytope(int dim, std::vector<Halfspace> hs);
  void cache_floats();
  static std::shared_ptr<const FaceLattice> build_lattice(const Polytope& P);

  int n_ = 0;
  std::vector<Halfspace> hs_;
  bool canonical_ = false;
  Mat unit_normals_;
  Vec unit_offsets_;
  std::shared_ptr<const FaceLattice> lattice_;
};

}  // namespace polydiff
