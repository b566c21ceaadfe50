// SPDX-License-Identifier: Apache-2.0

#include "polydiff/fields.hpp"

#include <cmath>
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

double spectral_norm(const Mat& J) {
  switch (J.rows()) {
    case 1:
      return std::abs(J(0, 0));
    case 2: {
      // Largest eigenvalue of the 2x2 Gram matrix, closed form.
      const Eigen::Matrix2d G = (J.transpose() * J).eval();
      const double mean = 0.5 * (G(0, 0) + G(1, 1));
      const double disc = std::sqrt(std::max(
          0.0, 0.25 * (G(0, 0) - G(1, 1)) * (G(0, 0) - G(1, 1)) + G(0, 1) * G(0, 1)));
      return std::sqrt(std::max(0.0, mean + disc));
    }
    case 3: {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
      es.computeDirect(Eigen::Matrix3d(J.transpose() * J), Eigen::EigenvaluesOnly);
      return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
    default: {
      Eigen::SelfAdjointEigenSolver<Mat> es(J.transpose() * J, Eigen::EigenvaluesOnly);
      return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
  }
}

// Contiguous term storage for the hot grid scans.
struct FlatPoly {
  int n = 0;
  std::vector<double> coefs;
  std::vector<int> exps;  // n entries per term

  explicit FlatPoly(const PolyD& p) : n(p.nvars()) {
    for (const auto& [e, c] : p.terms()) {
      coefs.push_back(c);
      exps.insert(exps.end(), e.begin(), e.end());
    }
  }

  double eval(const Vec& x) const {
    double total = 0;
    const int* e = exps.data();
    for (std::size_t t = 0; t < coefs.size(); ++t, e += n) {
      double term = coefs[t];
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < e[k]; ++p) term *= x[k];
      total += term;
    }
    return total;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Representation

struct VectorField::Impl {
  Kind kind = Kind::Affine;
  std::shared_ptr<const Polytope> domain;

  // Affine
  Mat A;
  Vec b;

  // Polynomial (components and precomputed partials)
  std::vector<PolyD> comps;
  std::vector<std::vector<PolyD>> jac;

  // Composite rho_g(f) = g + f o (id+g); InverseChart stores only g.
  std::optional<VectorField> g;
  std::optional<VectorField> f;
  GateCertificate cert_g;
  std::optional<GateCertificate> cert_f;
};

VectorField VectorField::zero(std::shared_ptr<const Polytope> P) {
  const int n = P->dim();
  return affine(std::move(P), Mat::Zero(n, n), Vec::Zero(n));
}

VectorField VectorField::affine(std::shared_ptr<const Polytope> P, Mat A, Vec b) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Affine;
  impl->domain = std::move(P);
  impl->A = std::move(A);
  impl->b = std::move(b);
  return VectorField(std::move(impl));
}

VectorField VectorField::polynomial(std::shared_ptr<const Polytope> P,
                                    std::vector<PolyD> comps) {
  const int n = P->dim();
  if (static_cast<int>(comps.size()) != n)
    throw Error(ErrorKind::Parse, "polynomial field needs one component per coordinate");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Polynomial;
  impl->domain = std::move(P);
  impl->jac.resize(n);
  for (int c = 0; c < n; ++c) {
    if (comps[c].nvars() != n)
      throw Error(ErrorKind::Parse, "polynomial component has wrong variable count");
    impl->jac[c].reserve(n);
    for (int e = 0; e < n; ++e) impl->jac[c].push_back(comps[c].partial(e));
  }
  impl->comps = std::move(comps);
  return VectorField(std::move(impl));
}

VectorField::Kind VectorField::kind() const { return impl_->kind; }
const Polytope& VectorField::domain() const { return *impl_->domain; }
const std::shared_ptr<const Polytope>& VectorField::domain_ptr() const {
  return impl_->domain;
}
const Mat& VectorField::affine_A() const { return impl_->A; }
const Vec& VectorField::affine_b() const { return impl_->b; }
const std::vector<PolyD>& VectorField::poly_components() const { return impl_->comps; }
const VectorField& VectorField::composite_g() const { return *impl_->g; }
const VectorField& VectorField::composite_f() const { return *impl_->f; }
const GateCertificate& VectorField::composite_cert_g() const { return impl_->cert_g; }
const std::optional<GateCertificate>& VectorField::composite_cert_f() const {
  return impl_->cert_f;
}
const VectorField& VectorField::inverse_g() const { return *impl_->g; }
const GateCertificate& VectorField::inverse_cert() const { return impl_->cert_g; }

bool VectorField::has_polynomial_form() const {
  return impl_->kind == Kind::Affine || impl_->kind == Kind::Polynomial;
}

std::vector<PolyD> VectorField::as_polynomials() const {
  const int n = domain().dim();
  if (impl_->kind == Kind::Polynomial) return impl_->comps;
  if (impl_->kind != Kind::Affine)
    throw std::logic_error("field has no closed polynomial form");
  std::vector<PolyD> out;
  out.reserve(n);
  for (int c = 0; c < n; ++c) {
    PolyD p(n);
    p.add_term(std::vector<int>(n, 0), impl_->b[c]);
    for (int e = 0; e < n; ++e) {
      std::vector<int> exp(n, 0);
      exp[e] = 1;
      p.add_term(std::move(exp), impl_->A(c, e));
    }
    out.push_back(std::move(p));
  }
  return out;
}

VectorField VectorField::scaled(double s) const {
  if (impl_->kind == Kind::Affine)
    return affine(impl_->domain, s * impl_->A, s * impl_->b);
  if (impl_->kind == Kind::Polynomial) {
    std::vector<PolyD> comps;
    comps.reserve(impl_->comps.size());
    for (const auto& p : impl_->comps) comps.push_back(p.scaled(s));
    return polynomial(impl_->domain, std::move(comps));
  }
  throw std::logic_error("scaled() applies to affine/polynomial fields only");
}

// ---------------------------------------------------------------------------
// Evaluation

Vec VectorField::eval_raw(const Vec& x) const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::Affine:
      return im.A * x + im.b;
    case Kind::Polynomial: {
      Vec out(x.size());
      for (Eigen::Index c = 0; c < x.size(); ++c) out[c] = im.comps[c].eval(x);
      return out;
    }
    case Kind::Composite: {
      const Vec gx = im.g->eval_raw(x);
      return gx + im.f->eval_raw(x + gx);
    }
    case Kind::InverseChart:
      return solve_near_identity(*im.g, im.cert_g.q, x) - x;
  }
  throw std::logic_error("unreachable");
}

Mat VectorField::jacobian_raw(const Vec& x) const {
  const Impl& im = *impl_;
  const Eigen::Index n = x.size();
  switch (im.kind) {
    case Kind::Affine:
      return im.A;
    case Kind::Polynomial: {
      Mat J(n, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index e = 0; e < n; ++e) J(c, e) = im.jac[c][e].eval(x);
      return J;
    }
    case Kind::Composite: {
      const Vec gx = im.g->eval_raw(x);
      const Mat Jg = im.g->jacobian_raw(x);
      const Mat Jf = im.f->jacobian_raw(x + gx);
      return Jg + Jf * (Mat::Identity(n, n) + Jg);
    }
    case Kind::InverseChart: {
      const Vec xin = solve_near_identity(*im.g, im.cert_g.q, x);
      const Mat Jg = im.g->jacobian_raw(xin);
      return (Mat::Identity(n, n) + Jg).inverse() - Mat::Identity(n, n);
    }
  }
  throw std::logic_error("unreachable");
}

Vec VectorField::eval(const Vec& x, double tol) const {
  if (!domain().contains(x, tol))
    throw Error(ErrorKind::NotInPolytope, "eval at " + point_str(x));
  return eval_raw(x);
}

Mat VectorField::jacobian(const Vec& x, double tol) const {
  if (!domain().contains(x, tol))
    throw Error(ErrorKind::NotInPolytope, "jacobian at " + point_str(x));
  return jacobian_raw(x);
}

// ---------------------------------------------------------------------------
// Stratification

StratificationReport is_stratified(const VectorField& f, int samples_per_face,
                                   double tol, std::uint64_t seed) {
  const Polytope& P = f.domain();
  const FaceLattice& lat = P.lattice();
  StratificationReport rep;
  rep.faces_checked = lat.n_faces();

  // Sampled route: tangency against every active functional, on interior
  // samples of every face and exactly at every vertex.
  for (int id = 0; id < lat.n_faces() && !rep.first_violation; ++id) {
    const Face& face = lat.face(id);
    if (face.active.empty()) continue;  // E(x) is all of R^n on the top face
    const std::vector<Vec> pts = face.dim == 0
                                     ? std::vector<Vec>{lat.vertex_d(face.vertices[0])}
                                     : P.sample(id, samples_per_face, seed);
    for (const Vec& x : pts) {
      const Vec fx = f.eval_raw(x);
      ++rep.points_checked;
      for (int i : face.active) {
        const double v = P.unit_normals().row(i).dot(fx);
        if (std::abs(v) > tol) {
          rep.first_violation = StratViolation{id, x, i, v, "sampled tangency failed"};
          break;
        }
      }
      if (rep.first_violation) break;
    }
  }

  // Symbolic route for fields in polynomial form: each active functional
  // composed with f must vanish identically on aff(F). The double
  // coefficients are lifted exactly, so a zero here is a theorem, not a
  // tolerance call.
  if (f.has_polynomial_form()) {
    rep.symbolic = true;
    const int n = P.dim();
    std::vector<PolyQ> lifted;
    for (const auto& p : f.as_polynomials()) lifted.push_back(lift_exact(p));
    const auto& hs = P.halfspaces();
    for (int id = 0; id < lat.n_faces() && !rep.first_violation; ++id) {
      const Face& face = lat.face(id);
      if (face.active.empty()) continue;
      std::vector<PolyQ> subs;
      subs.reserve(n);
      for (int c = 0; c < n; ++c) {
        PolyQ s(face.dim);
        s.add_term(std::vector<int>(face.dim, 0), face.witness[c]);
        for (int j = 0; j < face.dim; ++j) {
          std::vector<int> e(face.dim, 0);
          e[j] = 1;
          s.add_term(std::move(e), face.basis[j][c]);
        }
        subs.push_back(std::move(s));
      }
      for (int i : face.active) {
        PolyQ p(n);
        for (int c = 0; c < n; ++c) p = p + lifted[c].scaled(hs[i].normal[c]);
        const PolyQ restricted = p.substitute(subs);
        if (!restricted.is_zero()) {
          double worst = 0;
          for (const auto& [e, c] : restricted.terms())
            worst = std::max(worst, std::abs(to_double(c)));
          rep.first_violation =
              StratViolation{id, face.witness_d, i, worst,
                             "restriction to the face affine hull is not the zero polynomial"};
          break;
        }
      }
    }
  }

  rep.pass = !rep.first_violation.has_value();
  return rep;
}

// ---------------------------------------------------------------------------
// Operator-norm bounds

namespace {

// Upper bound for sup over the box of the Lipschitz constant of x -> J(x),
// derived from coefficients alone: Frobenius aggregation of per-entry
// gradient bounds, each entry bounded monomial by monomial.
double jacobian_derivative_bound(const std::vector<std::vector<PolyD>>& jac,
                                 const Vec& lo, const Vec& hi) {
  const int n = static_cast<int>(jac.size());
  Vec box(n);
  for (int k = 0; k < n; ++k) box[k] = std::max(std::abs(lo[k]), std::abs(hi[k]));
  double total = 0;
  for (int c = 0; c < n; ++c) {
    for (int e = 0; e < n; ++e) {
      double grad_sq = 0;
      for (int k = 0; k < n; ++k) {
        const PolyD d = jac[c][e].partial(k);
        double bound = 0;
        for (const auto& [exp, coef] : d.terms()) {
          double mono = 1;
          for (int v = 0; v < n; ++v)
            for (int p = 0; p < exp[v]; ++p) mono *= box[v];
          bound += std::abs(coef) * mono;
        }
        grad_sq += bound * bound;
      }
      total += grad_sq;
    }
  }
  return std::sqrt(total);
}

struct GridScan {
  double gmax = 0;
  Vec argmax;
};

template <class JacAt>
GridScan scan_grid(const Vec& lo, const Vec& hi, const std::vector<long>& counts,
                   const JacAt& jac_at) {
  const int n = static_cast<int>(counts.size());
  GridScan best;
  best.argmax = Vec::Zero(n);
  std::vector<long> idx(n, 0);
  Vec x(n);
  for (;;) {
    for (int k = 0; k < n; ++k) {
      const double t = counts[k] > 1 ? static_cast<double>(idx[k]) / (counts[k] - 1) : 0.0;
      x[k] = lo[k] + t * (hi[k] - lo[k]);
    }
    if (const auto J = jac_at(x)) {
      const double s = spectral_norm(*J);
      if (s > best.gmax) {
        best.gmax = s;
        best.argmax = x;
      }
    }
    int k = n - 1;
    while (k >= 0 && ++idx[k] == counts[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return best;
}

GateCertificate certified_polynomial_bound(const VectorField& f, bool with_slack,
                                           const SupOptions& opts) {
  const Polytope& P = f.domain();
  const int n = P.dim();
  const auto [lo, hi] = P.bounding_box();
  const double diag = (hi - lo).norm();

  // Jacobian as polynomials (affine fields ride the same path).
  std::vector<std::vector<PolyD>> jac(n);
  const auto comps = f.as_polynomials();
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) jac[c].push_back(comps[c].partial(e));
  const double lambda = with_slack ? jacobian_derivative_bound(jac, lo, hi) : 0.0;

  std::vector<FlatPoly> flat;
  flat.reserve(n * n);
  for (int c = 0; c < n; ++c)
    for (int e = 0; e < n; ++e) flat.emplace_back(jac[c][e]);
  auto jac_at = [&](const Vec& x) -> std::optional<Mat> {
    Mat J(n, n);
    for (int c = 0; c < n; ++c)
      for (int e = 0; e < n; ++e) J(c, e) = flat[c * n + e].eval(x);
    return J;
  };

  const double h0 = std::max(diag * opts.h0_fraction, 1e-12);
  std::vector<long> base(n);
  for (int k = 0; k < n; ++k)
    base[k] = std::max<long>(1, static_cast<long>(std::ceil((hi[k] - lo[k]) / h0)));

  GateCertificate cert;
  cert.mode = with_slack ? NormMode::Certified : NormMode::Estimate;
  double prev_bound = std::numeric_limits<double>::infinity();
  double best_bound = std::numeric_limits<double>::infinity();
  double best_gmax = -1;
  for (int level = 0;; ++level) {
    std::vector<long> counts(n);
    double total = 1;
    for (int k = 0; k < n; ++k) {
      counts[k] = base[k] * (1L << level) + 1;
      total *= static_cast<double>(counts[k]);
    }
    if (total > static_cast<double>(opts.max_grid_points) && level > 0) break;

    double h = 0;
    for (int k = 0; k < n; ++k)
      if (counts[k] > 1) h = std::max(h, (hi[k] - lo[k]) / static_cast<double>(counts[k] - 1));

    const GridScan scan = scan_grid(lo, hi, counts, jac_at);
    const double bound = scan.gmax + lambda * h * std::sqrt(static_cast<double>(n));
    cert.levels.emplace_back(h, bound);
    if (with_slack && bound < best_bound) {
      // Every level is a one-sided bound; keep the tightest.
      best_bound = bound;
      cert.q = bound;
      cert.argmax = scan.argmax;
    }
    if (!with_slack && scan.gmax > best_gmax) {
      // The grids are nested, so the finest max is the best estimate.
      best_gmax = scan.gmax;
      cert.q = scan.gmax;
      cert.argmax = scan.argmax;
    }
    if (std::abs(prev_bound - bound) <= opts.stabilization * std::max(1.0, std::abs(bound)))
      break;
    prev_bound = bound;
  }
  return cert;
}

GateCertificate estimate_bound(const VectorField& f, const SupOptions& opts) {
  if (f.has_polynomial_form()) return certified_polynomial_bound(f, false, opts);

  // Evaluation-only kinds: scan grid points that lie in M.
  const Polytope& P = f.domain();
  const int n = P.dim();
  const auto [lo, hi] = P.bounding_box();
  const double diag = (hi - lo).norm();
  const double h0 = std::max(diag * opts.h0_fraction, 1e-12);
  std::vector<long> counts(n);
  for (int k = 0; k < n; ++k)
    counts[k] = 2 * std::max<long>(1, static_cast<long>(std::ceil((hi[k] - lo[k]) / h0))) + 1;
  auto jac_at = [&](const Vec& x) -> std::optional<Mat> {
    if (!P.contains(x, kTolActive)) return std::nullopt;
    return f.jacobian_raw(x);
  };
  const GridScan scan = scan_grid(lo, hi, counts, jac_at);
  GateCertificate cert;
  cert.mode = NormMode::Estimate;
  cert.q = scan.gmax;
  cert.argmax = scan.argmax;
  return cert;
}

NormMode default_norm_mode(const VectorField& f) {
  switch (f.kind()) {
    case VectorField::Kind::Affine:
      return NormMode::Exact;
    case VectorField::Kind::Polynomial:
      return NormMode::Certified;
    case VectorField::Kind::Composite:
      return f.composite_cert_f() ? NormMode::Certified : NormMode::Estimate;
    case VectorField::Kind::InverseChart:
      return NormMode::Certified;
  }
  return NormMode::Estimate;
}

}  // namespace

GateCertificate sup_op_norm(const VectorField& f, NormMode mode, const SupOptions& opts) {
  GateCertificate cert;
  switch (mode) {
    case NormMode::Exact: {
      if (f.kind() != VectorField::Kind::Affine)
        throw std::logic_error("exact norm mode requires an affine field");
      cert.mode = NormMode::Exact;
      cert.q = spectral_norm(f.affine_A());
      cert.argmax = f.domain().lattice().face(f.domain().lattice().top()).witness_d;
      break;
    }
    case NormMode::Certified: {
      if (f.has_polynomial_form()) {
        cert = certified_polynomial_bound(f, true, opts);
      } else if (f.kind() == VectorField::Kind::Composite) {
        const auto& cf = f.composite_cert_f();
        if (!cf || cf->mode == NormMode::Estimate ||
            f.composite_cert_g().mode == NormMode::Estimate)
          throw std::logic_error(
              "certified composite bound needs certified child certificates");
        const double qg = f.composite_cert_g().q;
        const double qf = cf->q;
        cert.mode = NormMode::Certified;
        cert.q = qg + qf * (1.0 + qg);  // |g' + f'(I+g')| termwise
        cert.argmax = Vec::Zero(f.domain().dim());
      } else {  // InverseChart: |(I+g')^{-1} - I| <= q/(1-q) by Neumann series
        const double qg = f.inverse_cert().q;
        cert.mode = NormMode::Certified;
        cert.q = qg / (1.0 - qg);
        cert.argmax = Vec::Zero(f.domain().dim());
      }
      break;
    }
    case NormMode::Estimate:
      cert = estimate_bound(f, opts);
      break;
  }
  cert.strat = is_stratified(f, opts.strat_samples_per_face, kTolStrat, opts.seed);
  cert.stratified = cert.strat.pass;
  return cert;
}

GatedField gate(const VectorField& f, const SupOptions& opts) {
  GateCertificate cert = sup_op_norm(f, default_norm_mode(f), opts);
  if (!cert.stratified) {
    std::ostringstream os;
    os << "field is not stratified";
    if (cert.strat.first_violation) {
      const auto& v = *cert.strat.first_violation;
      const Face& face = f.domain().lattice().face(v.face_id);
      os << ": face {";
      for (std::size_t k = 0; k < face.active.size(); ++k)
        os << (k ? "," : "") << face.active[k];
      os << "} at " << point_str(v.point) << ", constraint " << v.constraint
         << ", value " << v.value;
    }
    throw Error(ErrorKind::NotStratified, os.str());
  }
  if (!(cert.q < 1.0)) {
    std::ostringstream os;
    os << "q=" << cert.q << " >= 1";
    if (cert.argmax.size() > 0) os << " near " << point_str(cert.argmax);
    throw Error(ErrorKind::GateNotSatisfied, os.str());
  }
  return GatedField{f, std::move(cert)};
}

// ---------------------------------------------------------------------------
// Chart translation and inversion

VectorField rho(const GatedField& g, const VectorField& f) {
  if (!g.field.domain().same_as(f.domain()))
    throw Error(ErrorKind::DomainMismatch, "rho needs fields on the same polytope");
  if (!g.cert.admissible())
    throw Error(ErrorKind::GateNotSatisfied, "rho requires an admissible certificate for g");
  auto impl = std::make_shared<VectorField::Impl>();
  impl->kind = VectorField::Kind::Composite;
  impl->domain = g.field.domain_ptr();
  impl->g = g.field;
  impl->f = f;
  impl->cert_g = g.cert;
  return VectorField(std::move(impl));
}

VectorField rho(const GatedField& g, const GatedField& f) {
  VectorField out = rho(g, f.field);
  auto impl = std::make_shared<VectorField::Impl>(*out.impl_);
  impl->cert_f = f.cert;
  return VectorField(std::move(impl));
}

VectorField inverse_chart(const GatedField& g) {
  if (!g.cert.admissible())
    throw Error(ErrorKind::GateNotSatisfied,
                "inverse chart requires an admissible certificate");
  auto impl = std::make_shared<VectorField::Impl>();
  impl->kind = VectorField::Kind::InverseChart;
  impl->domain = g.field.domain_ptr();
  impl->g = g.field;
  impl->cert_g = g.cert;
  return VectorField(std::move(impl));
}

Vec solve_near_identity(const VectorField& f, double q, const Vec& y, double tol_inv) {
  const Polytope& P = f.domain();
  if (q < 0 || q >= 1) throw std::logic_error("solve_near_identity needs q in [0,1)");
  if (!P.contains(y, kTolActive))
    throw Error(ErrorKind::NotInPolytope, "inversion target " + point_str(y));
  for (const Vec& v : P.vertices_d()) {
    if (v.size() == y.size() && (v.array() == y.array()).all()) return y;  // vertices are fixed
  }

  // Targets inside the tolerance band are pulled onto M so the fixed-point
  // equation is solvable; for y in M this is the identity.
  const Vec target = P.project(y);
  const int cap =
      (q > 0 ? static_cast<int>(std::ceil(std::log(tol_inv) / std::log(q))) : 0) + 50;
  const double factor = q / (1.0 - q);
  Vec x = target;
  bool converged = false;
  for (int it = 0; it < cap; ++it) {
    const Vec xn = P.project(target - f.eval_raw(x));
    const double delta = (xn - x).norm();
    x = xn;
    if (delta * factor <= tol_inv) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(ErrorKind::InversionNotConverged,
                "iteration cap hit for target " + point_str(y));
  const double res = (x + f.eval_raw(x) - target).norm();
  if (res > tol_inv * (1.0 + q) + 100 * kTolProj)
    throw Error(ErrorKind::InversionNotConverged,
                "residual " + std::to_string(res) + " exceeds the a-posteriori bound");
  return x;
}

}  // namespace polydiff
