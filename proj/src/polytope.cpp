// SPDX-License-Identifier: Apache-2.0

#include "polydiff/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "polydiff/errors.hpp"
#include "polydiff/lp.hpp"
#include "polydiff/ratlin.hpp"

namespace polydiff {

namespace {

std::string point_str(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

// Visits every k-subset of {0,...,m-1} in lexicographic order.
template <class F>
void for_each_subset_of_size(int m, int k, F&& visit) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > m) return;
  for (;;) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double u01(std::mt19937_64& g) {
  // strictly inside (0,1); portable across standard library implementations
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// FaceLattice

int FaceLattice::face_by_vertices(const std::vector<int>& sorted_vertex_ids) const {
  for (int id = 0; id < n_faces(); ++id) {
    if (faces_[id].vertices == sorted_vertex_ids) return id;
  }
  return -1;
}

bool FaceLattice::face_contains(int super, int sub) const {
  const auto& a = faces_[sub].vertices;
  const auto& b = faces_[super].vertices;
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// ---------------------------------------------------------------------------
// Construction and validation

Polytope::Polytope(int dim, std::vector<Halfspace> hs) : n_(dim), hs_(std::move(hs)) {
  cache_floats();
}

void Polytope::cache_floats() {
  const int m = static_cast<int>(hs_.size());
  unit_normals_.resize(m, n_);
  unit_offsets_.resize(m);
  for (int i = 0; i < m; ++i) {
    Vec a = to_vec(hs_[i].normal);
    const double len = a.norm();
    unit_normals_.row(i) = a / len;
    unit_offsets_[i] = to_double(hs_[i].offset) / len;
  }
}

std::shared_ptr<const Polytope> Polytope::make(int dim, std::vector<Halfspace> hs) {
  if (dim < 1) throw Error(ErrorKind::Parse, "ambient dimension must be positive");
  if (hs.empty()) throw Error(ErrorKind::Unbounded, "no halfspaces given");
  for (const auto& h : hs) {
    if (static_cast<int>(h.normal.size()) != dim)
      throw Error(ErrorKind::Parse, "halfspace normal has wrong length");
    bool all_zero = true;
    for (const auto& a : h.normal)
      if (a != 0) all_zero = false;
    if (all_zero) throw Error(ErrorKind::Parse, "zero normal in halfspace list");
  }

  const int m = static_cast<int>(hs.size());

  // Strict interior: maximize t subject to <a_i, x> + t <= b_i, t <= 1.
  {
    MatQ A(m + 1, VecQ(dim + 1, Rat(0)));
    VecQ b(m + 1);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < dim; ++k) A[i][k] = hs[i].normal[k];
      A[i][dim] = 1;
      b[i] = hs[i].offset;
    }
    A[m][dim] = 1;
    b[m] = 1;
    VecQ c(dim + 1, Rat(0));
    c[dim] = 1;
    const LpResult r = lp_maximize(A, b, c);
    if (r.status != LpStatus::Optimal || r.value <= 0)
      throw Error(ErrorKind::EmptyInterior, "no strictly interior point exists");
  }

  // Boundedness: the recession cone {d : A d <= 0} must be {0}.
  for (int k = 0; k < dim; ++k) {
    for (int sign = -1; sign <= 1; sign += 2) {
      MatQ A(m + 1, VecQ(dim, Rat(0)));
      VecQ b(m + 1, Rat(0));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < dim; ++j) A[i][j] = hs[i].normal[j];
      A[m][k] = sign;
      b[m] = 1;
      VecQ c(dim, Rat(0));
      c[k] = sign;
      const LpResult r = lp_maximize(A, b, c);
      if (r.status != LpStatus::Optimal || r.value > 0)
        throw Error(ErrorKind::Unbounded, "recession direction exists");
    }
  }

  return std::shared_ptr<const Polytope>(new Polytope(dim, std::move(hs)));
}

std::shared_ptr<const Polytope> Polytope::canonicalize() const {
  if (canonical_) {
    // Already carries its lattice; nothing to do.
    return std::shared_ptr<const Polytope>(new Polytope(*this));
  }
  const int m = static_cast<int>(hs_.size());
  std::vector<bool> kept(m, true);
  for (int i = 0; i < m; ++i) {
    MatQ A;
    VecQ b;
    for (int j = 0; j < m; ++j) {
      if (j == i || !kept[j]) continue;
      A.push_back(hs_[j].normal);
      b.push_back(hs_[j].offset);
    }
    if (A.empty()) continue;
    const LpResult r = lp_maximize(A, b, hs_[i].normal);
    // Implied by the others iff max <a_i, x> over them stays within b_i.
    if (r.status == LpStatus::Optimal && r.value <= hs_[i].offset) kept[i] = false;
  }
  std::vector<Halfspace> reduced;
  for (int i = 0; i < m; ++i)
    if (kept[i]) reduced.push_back(hs_[i]);

  auto out = std::shared_ptr<Polytope>(new Polytope(n_, std::move(reduced)));
  out->canonical_ = true;
  out->lattice_ = build_lattice(*out);
  return out;
}

const FaceLattice& Polytope::lattice() const {
  if (!lattice_) throw std::logic_error("face lattice requires a canonical polytope");
  return *lattice_;
}

bool Polytope::same_as(const Polytope& other) const {
  if (this == &other) return true;
  if (n_ != other.n_ || hs_.size() != other.hs_.size()) return false;
  for (std::size_t i = 0; i < hs_.size(); ++i) {
    if (hs_[i].offset != other.hs_[i].offset) return false;
    if (hs_[i].normal != other.hs_[i].normal) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Lattice construction: exact vertex enumeration over rank-n active subsets,
// then faces as the intersection closure of the facet vertex sets.

std::shared_ptr<const FaceLattice> Polytope::build_lattice(const Polytope& P) {
  const int n = P.dim();
  const auto& hs = P.halfspaces();
  const int m = static_cast<int>(hs.size());

  auto lat = std::make_shared<FaceLattice>();
  lat->ambient_dim_ = n;

  // Vertices: exact solutions of rank-n subsystems that satisfy all rows.
  std::map<VecQ, int> seen;
  for_each_subset_of_size(m, n, [&](const std::vector<int>& idx) {
    MatQ A(n, VecQ(n));
    VecQ b(n);
    for (int r = 0; r < n; ++r) {
      A[r] = hs[idx[r]].normal;
      b[r] = hs[idx[r]].offset;
    }
    const auto x = ratlin::solve_square(std::move(A), std::move(b));
    if (!x) return;
    for (int i = 0; i < m; ++i) {
      if (dot(hs[i].normal, *x) > hs[i].offset) return;
    }
    if (seen.emplace(*x, static_cast<int>(seen.size())).second) {
      lat->vertices_.push_back(*x);
      lat->vertices_d_.push_back(to_vec(*x));
    }
  });
  const int nv = lat->n_vertices();
  if (nv < n + 1)
    throw Error(ErrorKind::InternalInvariantViolation, "vertex enumeration found too few vertices");

  // Exact active set of each vertex, and vertex set of each facet.
  std::vector<std::vector<int>> vertex_active(nv);
  std::vector<std::vector<int>> facet_vertices(m);
  for (int v = 0; v < nv; ++v) {
    for (int i = 0; i < m; ++i) {
      if (dot(hs[i].normal, lat->vertices_[v]) == hs[i].offset) {
        vertex_active[v].push_back(i);
        facet_vertices[i].push_back(v);
      }
    }
  }
  lat->facet_vertices_ = facet_vertices;

  // Closure of {all vertices} under intersection with facet vertex sets.
  std::vector<int> all(nv);
  for (int v = 0; v < nv; ++v) all[v] = v;
  std::set<std::vector<int>> closed{all};
  std::vector<std::vector<int>> work{all};
  while (!work.empty()) {
    const std::vector<int> w = std::move(work.back());
    work.pop_back();
    for (int i = 0; i < m; ++i) {
      std::vector<int> inter;
      std::set_intersection(w.begin(), w.end(), facet_vertices[i].begin(),
                            facet_vertices[i].end(), std::back_inserter(inter));
      if (inter.empty()) continue;
      if (closed.insert(inter).second) work.push_back(inter);
    }
  }

  // Face records.
  for (const auto& vset : closed) {
    Face f;
    f.vertices = vset;
    f.active = vertex_active[vset[0]];
    for (std::size_t k = 1; k < vset.size() && !f.active.empty(); ++k) {
      std::vector<int> inter;
      std::set_intersection(f.active.begin(), f.active.end(),
                            vertex_active[vset[k]].begin(), vertex_active[vset[k]].end(),
                            std::back_inserter(inter));
      f.active = std::move(inter);
    }

    const VecQ& v0 = lat->vertices_[vset[0]];
    MatQ diffs;
    for (std::size_t k = 1; k < vset.size(); ++k) {
      VecQ d(n);
      for (int c = 0; c < n; ++c) d[c] = lat->vertices_[vset[k]][c] - v0[c];
      diffs.push_back(std::move(d));
    }
    for (int row : ratlin::independent_rows(diffs)) f.basis.push_back(diffs[row]);
    f.dim = static_cast<int>(f.basis.size());

    f.witness.assign(n, Rat(0));
    for (int vid : vset)
      for (int c = 0; c < n; ++c) f.witness[c] += lat->vertices_[vid][c];
    const Rat count(static_cast<int>(vset.size()));
    for (int c = 0; c < n; ++c) f.witness[c] /= count;

    f.witness_d = to_vec(f.witness);
    f.basis_d.resize(f.dim, n);
    for (int r = 0; r < f.dim; ++r) f.basis_d.row(r) = to_vec(f.basis[r]);

    lat->faces_.push_back(std::move(f));
  }

  std::sort(lat->faces_.begin(), lat->faces_.end(), [](const Face& a, const Face& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });

  lat->by_dim_.assign(n + 1, {});
  for (int id = 0; id < lat->n_faces(); ++id) {
    const Face& f = lat->faces_[id];
    lat->by_dim_[f.dim].push_back(id);
    if (f.dim == n) lat->top_ = id;
  }
  if (lat->top_ < 0 || lat->by_dim_[n].size() != 1)
    throw Error(ErrorKind::InternalInvariantViolation, "expected exactly one top face");
  return lat;
}

// ---------------------------------------------------------------------------
// Membership, faces, strata

bool Polytope::contains(const Vec& x, double tol) const {
  return ((unit_normals_ * x - unit_offsets_).array() <= tol).all();
}

bool Polytope::contains_exact(const VecQ& x) const {
  for (const auto& h : hs_) {
    if (dot(h.normal, x) > h.offset) return false;
  }
  return true;
}

std::vector<int> Polytope::active_set(const Vec& x, double tol) const {
  const Vec slack = unit_offsets_ - unit_normals_ * x;
  std::vector<int> active;
  for (Eigen::Index i = 0; i < slack.size(); ++i) {
    if (slack[i] < -tol)
      throw Error(ErrorKind::NotInPolytope,
                  "point " + point_str(x) + " violates constraint " + std::to_string(i));
    if (slack[i] <= tol) active.push_back(static_cast<int>(i));
  }
  return active;
}

std::vector<int> Polytope::active_set_exact(const VecQ& x) const {
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(hs_.size()); ++i) {
    const Rat v = dot(hs_[i].normal, x);
    if (v > hs_[i].offset)
      throw Error(ErrorKind::NotInPolytope, "point violates constraint " + std::to_string(i));
    if (v == hs_[i].offset) active.push_back(i);
  }
  return active;
}

namespace {

int face_from_active(const FaceLattice& lat, const std::vector<int>& active) {
  if (active.empty()) return lat.top();
  std::vector<int> vset = lat.facet_vertices(active[0]);
  for (std::size_t k = 1; k < active.size() && !vset.empty(); ++k) {
    std::vector<int> inter;
    const auto& fv = lat.facet_vertices(active[k]);
    std::set_intersection(vset.begin(), vset.end(), fv.begin(), fv.end(),
                          std::back_inserter(inter));
    vset = std::move(inter);
  }
  if (vset.empty()) return -1;
  return lat.face_by_vertices(vset);
}

}  // namespace

int Polytope::smallest_face_id(const Vec& x, double tol) const {
  const auto active = active_set(x, tol);
  const int id = face_from_active(lattice(), active);
  if (id < 0)
    throw Error(ErrorKind::InternalInvariantViolation,
                "active set at " + point_str(x) + " is inconsistent at this tolerance");
  return id;
}

int Polytope::smallest_face_id_exact(const VecQ& x) const {
  const auto active = active_set_exact(x);
  const int id = face_from_active(lattice(), active);
  if (id < 0)
    throw Error(ErrorKind::InternalInvariantViolation, "exact active set is inconsistent");
  return id;
}

int Polytope::index(const Vec& x, double tol) const {
  return n_ - lattice().face(smallest_face_id(x, tol)).dim;
}

int Polytope::index_exact(const VecQ& x) const {
  return n_ - lattice().face(smallest_face_id_exact(x)).dim;
}

std::vector<int> Polytope::stratum(int i) const {
  if (i < 0 || i > n_) throw std::logic_error("stratum index out of range");
  return lattice().faces_of_dim(n_ - i);
}

// ---------------------------------------------------------------------------
// Projection and sampling

Vec Polytope::project(const Vec& x, double tol, int max_sweeps) const {
  const int m = static_cast<int>(hs_.size());
  Vec cur = x;
  Mat corrections = Mat::Zero(m, n_);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Vec before = cur;
    for (int i = 0; i < m; ++i) {
      const Vec y = cur + corrections.row(i).transpose();
      const double viol = unit_normals_.row(i).dot(y) - unit_offsets_[i];
      Vec next = y;
      if (viol > 0) next -= viol * unit_normals_.row(i).transpose();
      corrections.row(i) = (y - next).transpose();
      cur = next;
    }
    const double moved = (cur - before).norm();
    const double worst = (unit_normals_ * cur - unit_offsets_).maxCoeff();
    if (moved < tol && worst <= tol) return cur;
  }
  throw Error(ErrorKind::ProjectionNotConverged,
              "Dykstra hit the sweep cap at " + point_str(x));
}

std::vector<Vec> Polytope::sample(int face_id, int count, std::uint64_t seed) const {
  const auto& lat = lattice();
  const Face& f = lat.face(face_id);
  std::vector<Vec> out;
  out.reserve(count);
  if (f.dim == 0) {
    out.assign(count, lat.vertex_d(f.vertices[0]));
    return out;
  }
  std::seed_seq sseq{static_cast<std::uint64_t>(face_id) + 1, seed};
  std::mt19937_64 gen(sseq);
  const int k = static_cast<int>(f.vertices.size());
  for (int c = 0; c < count; ++c) {
    // Flat Dirichlet weights; strictly positive, so the point lands in the
    // algebraic interior.
    std::vector<double> w(k);
    double total = 0;
    for (int j = 0; j < k; ++j) {
      w[j] = -std::log(u01(gen));
      total += w[j];
    }
    Vec p = Vec::Zero(n_);
    for (int j = 0; j < k; ++j) p += (w[j] / total) * lat.vertex_d(f.vertices[j]);
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<Vec, Vec> Polytope::bounding_box() const {
  const auto& verts = vertices_d();
  Vec lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

}  // namespace polydiff
