// SPDX-License-Identifier: Apache-2.0

#include "polydiff/diffeo.hpp"

#include <algorithm>
#include <sstream>

#include "polydiff/errors.hpp"

namespace polydiff {

namespace {

std::string point_str(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

bool is_vertex_of(const Polytope& P, const Vec& x) {
  for (const Vec& v : P.vertices_d()) {
    if ((v.array() == x.array()).all()) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// FacePermutation

FacePermutation FacePermutation::identity(int n_faces) {
  std::vector<int> p(n_faces);
  for (int i = 0; i < n_faces; ++i) p[i] = i;
  return FacePermutation(std::move(p));
}

bool FacePermutation::is_identity() const {
  for (int i = 0; i < size(); ++i)
    if (perm_[i] != i) return false;
  return true;
}

FacePermutation FacePermutation::after(const FacePermutation& inner) const {
  std::vector<int> p(perm_.size());
  for (int i = 0; i < size(); ++i) p[i] = perm_[inner.perm_[i]];
  return FacePermutation(std::move(p));
}

FacePermutation FacePermutation::inverse() const {
  std::vector<int> p(perm_.size());
  for (int i = 0; i < size(); ++i) p[perm_[i]] = i;
  return FacePermutation(std::move(p));
}

std::vector<std::vector<int>> FacePermutation::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(perm_.size(), false);
  for (int i = 0; i < size(); ++i) {
    if (seen[i] || perm_[i] == i) continue;
    std::vector<int> cycle;
    int j = i;
    while (!seen[j]) {
      seen[j] = true;
      cycle.push_back(j);
      j = perm_[j];
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction

Diffeo Diffeo::identity(std::shared_ptr<const Polytope> P) {
  return Diffeo(std::move(P), {});
}

Diffeo Diffeo::near_identity(GatedField gf) {
  if (!gf.cert.admissible())
    throw Error(ErrorKind::GateNotSatisfied, "certificate is not admissible");
  auto domain = gf.field.domain_ptr();
  Letter letter;
  letter.kind = Letter::Kind::NearIdentity;
  letter.gated = std::make_shared<const GatedField>(std::move(gf));
  return Diffeo(std::move(domain), {std::move(letter)});
}

Diffeo Diffeo::try_near_identity(const VectorField& f, const SupOptions& opts) {
  return near_identity(gate(f, opts));
}

Diffeo Diffeo::affine_symmetry(const Mat& L, const Vec& t,
                               std::shared_ptr<const Polytope> P, double tol) {
  const int n = P->dim();
  if (L.rows() != n || L.cols() != n || t.size() != n)
    throw Error(ErrorKind::NotASymmetry, "dimension mismatch");
  Eigen::FullPivLU<Mat> lu(L);
  if (!lu.isInvertible())
    throw Error(ErrorKind::NotASymmetry, "matrix is singular");

  const auto& verts = P->vertices_d();
  const int nv = static_cast<int>(verts.size());
  std::vector<bool> hit(nv, false);
  for (int v = 0; v < nv; ++v) {
    const Vec image = L * verts[v] + t;
    int match = -1;
    for (int w = 0; w < nv; ++w) {
      if ((image - verts[w]).lpNorm<Eigen::Infinity>() <= tol) {
        match = w;
        break;
      }
    }
    if (match < 0 || hit[match])
      throw Error(ErrorKind::NotASymmetry,
                  "vertex " + point_str(verts[v]) + " maps to " + point_str(image) +
                      ", which is not a fresh vertex");
    hit[match] = true;
  }

  Letter letter;
  letter.kind = Letter::Kind::AffineSymmetry;
  letter.L = L;
  letter.t = t;
  letter.L_inv = lu.inverse();
  letter.t_inv = -letter.L_inv * t;
  return Diffeo(std::move(P), {std::move(letter)});
}

// ---------------------------------------------------------------------------
// Evaluation

Vec Diffeo::eval(const Vec& x, double tol_inv) const {
  if (!domain_->contains(x, kTolActive))
    throw Error(ErrorKind::NotInPolytope, "eval at " + point_str(x));
  Vec cur = x;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    switch (it->kind) {
      case Letter::Kind::NearIdentity:
        if (!is_vertex_of(*domain_, cur)) cur += it->gated->field.eval_raw(cur);
        break;
      case Letter::Kind::InverseNearIdentity:
        cur = solve_near_identity(it->gated->field, it->gated->cert.q, cur, tol_inv);
        break;
      case Letter::Kind::AffineSymmetry:
        cur = it->L * cur + it->t;
        break;
    }
  }
  return cur;
}

Mat Diffeo::jacobian(const Vec& x, double tol_inv) const {
  if (!domain_->contains(x, kTolActive))
    throw Error(ErrorKind::NotInPolytope, "jacobian at " + point_str(x));
  const int n = domain_->dim();
  Vec cur = x;
  Mat J = Mat::Identity(n, n);
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) {
    switch (it->kind) {
      case Letter::Kind::NearIdentity: {
        J = (Mat::Identity(n, n) + it->gated->field.jacobian_raw(cur)) * J;
        if (!is_vertex_of(*domain_, cur)) cur += it->gated->field.eval_raw(cur);
        break;
      }
      case Letter::Kind::InverseNearIdentity: {
        // (phi^{-1})'(y) = (I + f'(x*))^{-1} at the preimage x*.
        const Vec pre =
            solve_near_identity(it->gated->field, it->gated->cert.q, cur, tol_inv);
        J = (Mat::Identity(n, n) + it->gated->field.jacobian_raw(pre)).inverse() * J;
        cur = pre;
        break;
      }
      case Letter::Kind::AffineSymmetry:
        J = it->L * J;
        cur = it->L * cur + it->t;
        break;
    }
  }
  return J;
}

Mat Diffeo::inverse_jacobian(const Vec& x, double tol_inv) const {
  return inverse().jacobian(x, tol_inv);
}

// ---------------------------------------------------------------------------
// Group structure

Diffeo Diffeo::compose(const Diffeo& rhs) const {
  if (!domain_->same_as(rhs.domain()))
    throw Error(ErrorKind::DomainMismatch, "composition across different polytopes");
  std::vector<Letter> word = word_;
  word.insert(word.end(), rhs.word_.begin(), rhs.word_.end());
  return Diffeo(domain_, std::move(word));
}

Diffeo Diffeo::inverse() const {
  std::vector<Letter> word(word_.rbegin(), word_.rend());
  for (Letter& letter : word) {
    switch (letter.kind) {
      case Letter::Kind::NearIdentity:
        letter.kind = Letter::Kind::InverseNearIdentity;
        break;
      case Letter::Kind::InverseNearIdentity:
        letter.kind = Letter::Kind::NearIdentity;
        break;
      case Letter::Kind::AffineSymmetry:
        std::swap(letter.L, letter.L_inv);
        std::swap(letter.t, letter.t_inv);
        break;
    }
  }
  return Diffeo(domain_, std::move(word));
}

const GatedField& Diffeo::chart() const {
  if (word_.size() != 1 || word_[0].kind != Letter::Kind::NearIdentity)
    throw std::logic_error("chart() needs a single near-identity letter");
  return *word_[0].gated;
}

Diffeo conjugate(const Diffeo& psi, const Diffeo& phi) {
  return psi.compose(phi).compose(psi.inverse());
}

VectorField chart_product(const GatedField& f, const GatedField& g) {
  return rho(g, f);
}

Vec invert_point(const GatedField& f, const Vec& y, double tol_inv) {
  if (!f.cert.admissible())
    throw Error(ErrorKind::GateNotSatisfied, "inversion requires an admissible certificate");
  return solve_near_identity(f.field, f.cert.q, y, tol_inv);
}

// ---------------------------------------------------------------------------
// Induced data

FacePermutation Diffeo::face_permutation(double tol, double tol_inv) const {
  const FaceLattice& lat = domain_->lattice();
  std::vector<int> perm(lat.n_faces(), -1);
  std::vector<bool> hit(lat.n_faces(), false);
  for (int id = 0; id < lat.n_faces(); ++id) {
    const Vec image = eval(lat.face(id).witness_d, tol_inv);
    const int gid = domain_->smallest_face_id(image, tol);
    if (hit[gid] || lat.face(gid).dim != lat.face(id).dim)
      throw Error(ErrorKind::InternalInvariantViolation,
                  "induced face map is not a dimension-preserving bijection; "
                  "a certificate is broken");
    perm[id] = gid;
    hit[gid] = true;
  }
  return FacePermutation(std::move(perm));
}

bool Diffeo::is_boundary_fixing(int samples_per_face, std::uint64_t seed,
                                double tol) const {
  const FaceLattice& lat = domain_->lattice();
  for (int id = 0; id < lat.n_faces(); ++id) {
    const Face& face = lat.face(id);
    if (face.dim == domain_->dim()) continue;  // boundary faces only
    const std::vector<Vec> pts =
        face.dim == 0 ? std::vector<Vec>{lat.vertex_d(face.vertices[0])}
                      : domain_->sample(id, samples_per_face, seed);
    for (const Vec& x : pts) {
      if ((eval(x) - x).lpNorm<Eigen::Infinity>() > tol) return false;
    }
  }
  return true;
}

}  // namespace polydiff
