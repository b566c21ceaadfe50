// SPDX-License-Identifier: Apache-2.0

#include "polydiff/lemma_lab.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "polydiff/errors.hpp"

namespace polydiff {

namespace {

double poly2_eval(const PolyD& p, double x, double y) {
  Vec v(2);
  v << x, y;
  return p.eval(v);
}

}  // namespace

// ---------------------------------------------------------------------------

DerToFaceReport check_der_to_face(const Polytope& P, const Vec& x0, const Vec& v,
                                  const Vec& w, double t_max, double tol) {
  const int curve_samples = 512;
  for (int s = 0; s <= curve_samples; ++s) {
    const double t = t_max * s / curve_samples;
    const Vec gamma = x0 + t * v + t * t * w;
    if (!P.contains(gamma, tol))
      throw Error(ErrorKind::CurveNotInM,
                  "curve leaves the polytope at t=" + std::to_string(t));
  }

  DerToFaceReport rep;
  rep.curve_samples = curve_samples + 1;
  const int ray_samples = 256;
  double eps = t_max;
  while (eps > 1e-12) {
    bool ok = true;
    for (int s = 0; s <= ray_samples; ++s) {
      const double t = eps * s / ray_samples;
      if (!P.contains(x0 + t * v, tol)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      rep.epsilon = eps;
      rep.pass = true;
      return rep;
    }
    eps /= 2;
  }
  rep.pass = false;  // unreachable for curves that start inward and stay in M
  return rep;
}

// ---------------------------------------------------------------------------

FaceIntoFaceReport check_face_into_face(const Diffeo& d, int samples_per_face,
                                        std::uint64_t seed, double tol) {
  const Polytope& P = d.domain();
  const FaceLattice& lat = P.lattice();
  FaceIntoFaceReport rep;
  rep.faces_checked = lat.n_faces();

  for (int id = 0; id < lat.n_faces(); ++id) {
    const Face& face = lat.face(id);
    const std::vector<Vec> pts =
        face.dim == 0 ? std::vector<Vec>{lat.vertex_d(face.vertices[0])}
                      : P.sample(id, samples_per_face, seed);
    for (const Vec& x : pts) {
      ++rep.points_checked;
      const Vec y = d.eval(x);
      const int gid = P.smallest_face_id(y);
      const Face& image_face = lat.face(gid);
      if (image_face.dim != face.dim) {
        std::ostringstream os;
        os << "face of dim " << face.dim << " maps to a point of index "
           << P.dim() - image_face.dim;
        rep.first_failure = rep.first_failure ? rep.first_failure : std::optional(os.str());
        rep.pass = false;
        return rep;
      }
      if (face.dim == 0) continue;  // E(x) = {0}

      const Mat J = d.jacobian(x);
      // Orthonormal frames for E(x) and E(phi(x)).
      const Mat U = face.basis_d.transpose();  // n x dim
      Eigen::HouseholderQR<Mat> qr_from(U);
      const Mat Qf = Mat(qr_from.householderQ()).leftCols(face.dim);
      const Mat V = image_face.basis_d.transpose();
      Eigen::HouseholderQR<Mat> qr_to(V);
      const Mat Qt = Mat(qr_to.householderQ()).leftCols(image_face.dim);

      // Inclusion: J E(x) lies in Span E(phi(x)).
      const Mat image = J * Qf;  // n x dim
      const Mat residual = image - Qt * (Qt.transpose() * image);
      for (int c = 0; c < face.dim; ++c) {
        const double r = residual.col(c).norm() / std::max(1.0, image.col(c).norm());
        rep.max_inclusion_residual = std::max(rep.max_inclusion_residual, r);
        if (r > tol) {
          std::ostringstream os;
          os << "inclusion residual " << r << " on a face of dim " << face.dim;
          rep.first_failure = os.str();
          rep.pass = false;
          return rep;
        }
      }
      // Spanning: the projected image must have full rank.
      const Mat proj = Qt.transpose() * image;  // dim x dim
      Eigen::JacobiSVD<Mat> svd(proj);
      if (svd.singularValues().minCoeff() <= tol) {
        std::ostringstream os;
        os << "projected image is rank deficient on a face of dim " << face.dim;
        rep.first_failure = os.str();
        rep.pass = false;
        return rep;
      }
    }
  }
  rep.pass = true;
  return rep;
}

// ---------------------------------------------------------------------------

LipInverseReport check_lip_inverse(const VectorField& f, double q, int pairs,
                                   std::uint64_t seed, double slack) {
  const Polytope& P = f.domain();
  const int top = P.lattice().top();
  const std::vector<Vec> xs = P.sample(top, 2 * pairs, seed);

  LipInverseReport rep;
  rep.q = q;
  rep.bound = 1.0 / (1.0 - q) + slack;
  rep.pairs = pairs;
  for (int p = 0; p < pairs; ++p) {
    const Vec& x = xs[2 * p];
    const Vec& y = xs[2 * p + 1];
    const double dist = (x - y).norm();
    if (dist == 0) continue;
    // a = phi(x), b = phi(y): the ratio |phi^{-1}a - phi^{-1}b| / |a - b|
    // measured where the inverse is defined.
    const Vec a = x + f.eval_raw(x);
    const Vec b = y + f.eval_raw(y);
    const double ratio = dist / (a - b).norm();
    rep.empirical_max = std::max(rep.empirical_max, ratio);
  }
  rep.pass = rep.empirical_max <= rep.bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Local-addition falsifier

namespace {

// One-sided partial with a single Richardson refinement; the y >= 0 wall at
// x = 0 rules out central differences.
double one_sided_partial(const std::function<double(double)>& g, double h) {
  const double d1 = (g(h) - g(0)) / h;
  const double d2 = (g(h / 2) - g(0)) / (h / 2);
  return 2 * d2 - d1;
}

FalsificationWitness scan_leaves_m(const std::function<double(double)>& h_of_t,
                                   double theta, double dy, double t0) {
  for (double t = t0; t >= 1e-12; t /= 2) {
    const double h = h_of_t(t);
    if (h < 0) {
      FalsificationWitness w;
      w.failure_mode = FailureMode::LeavesM;
      w.theta = theta;
      w.t = t;
      w.h_value = h;
      w.dtau_dy = dy;
      w.detail = "h(t) = tau(t, -theta t) < 0 while (t, -theta t) is an inner tangent vector";
      return w;
    }
  }
  throw Error(ErrorKind::NoWitnessFound, "scan reached the floor t = 1e-12");
}

}  // namespace

FalsificationWitness falsify_local_addition(const LocalAdditionCandidate& c) {
  if (c.tau.nvars() != 2)
    throw Error(ErrorKind::Parse, "candidate must be a polynomial in (x, y)");
  const double rho = c.domain_radius;
  const double x_max = std::min(1.0, 0.9 * rho);

  // (A2): tau(x, 0) = x on a sample grid.
  for (int s = 0; s <= 64; ++s) {
    const double x = x_max * s / 64;
    const double v = poly2_eval(c.tau, x, 0.0);
    if (std::abs(v - x) > 1e-9 * std::max(1.0, std::abs(x))) {
      FalsificationWitness w;
      w.failure_mode = FailureMode::A2Violated;
      w.t = x;
      w.h_value = v;
      std::ostringstream os;
      os << "tau(" << x << ", 0) = " << v << " != " << x;
      w.detail = os.str();
      return w;
    }
  }

  const double dy =
      one_sided_partial([&](double y) { return poly2_eval(c.tau, 0.0, y); }, 1e-6);
  if (std::abs(dy) <= 1e-8) {
    FalsificationWitness w;
    w.failure_mode = FailureMode::A1JacobianSingular;
    w.dtau_dy = dy;
    w.detail =
        "d tau/d y (0,0) vanishes, so J = [[1, 0], [1, 0]] is singular and "
        "(tau, pi) cannot be a diffeomorphism near the corner";
    return w;
  }
  if (dy < 0) {
    // tau(0, y) dips below 0 for small y >= 0: it already leaves M on the fibre.
    return scan_leaves_m([&](double t) { return poly2_eval(c.tau, 0.0, t); }, 0.0, dy,
                         std::min(1e-3, 0.5 * rho));
  }

  const double theta = 2.0 / dy;  // theta * dtau/dy = 2 > 1
  const double t0 = std::min(1e-3, 0.5 * rho / std::max(1.0, theta));
  return scan_leaves_m([&](double t) { return poly2_eval(c.tau, t, -theta * t); }, theta,
                       dy, t0);
}

FalsificationWitness falsify_corner_chart(const PolyD& sigma1, int n, int k,
                                          double domain_radius) {
  if (sigma1.nvars() != 2 * n)
    throw Error(ErrorKind::Parse, "sigma1 must be a polynomial in (x_1..x_n, y_1..y_n)");
  if (k < 1 || k > n) throw Error(ErrorKind::Parse, "need 1 <= k <= n");
  const double rho = domain_radius;

  auto eval_s = [&](const Vec& x, const Vec& y) {
    Vec z(2 * n);
    z << x, y;
    return sigma1.eval(z);
  };

  // (A2): sigma(x, 0) = x, checked on the first component along each axis.
  const double x_max = std::min(1.0, 0.9 * rho);
  for (int axis = 0; axis < n; ++axis) {
    for (int s = 0; s <= 16; ++s) {
      const double t = x_max * s / 16;
      Vec x = Vec::Zero(n);
      x[axis] = t;
      const double expected = axis == 0 ? t : 0.0;
      const double v = eval_s(x, Vec::Zero(n));
      if (std::abs(v - expected) > 1e-9 * std::max(1.0, std::abs(t))) {
        FalsificationWitness w;
        w.failure_mode = FailureMode::A2Violated;
        w.t = t;
        w.h_value = v;
        w.detail = "sigma1(x, 0) != x_1 along axis " + std::to_string(axis);
        return w;
      }
    }
  }

  // One-sided partials d sigma1/d y_j at the corner. With sigma1 >= 0 on the
  // chart, invertibility of the block Jacobian forces a positive one.
  int best_j = -1;
  double best_dy = 0;
  for (int j = 0; j < n; ++j) {
    const double dy = one_sided_partial(
        [&](double t) {
          Vec y = Vec::Zero(n);
          y[j] = t;
          return eval_s(Vec::Zero(n), y);
        },
        1e-6);
    if (dy > best_dy) {
      best_dy = dy;
      best_j = j;
    }
  }
  if (best_j < 0 || best_dy <= 1e-8) {
    FalsificationWitness w;
    w.failure_mode = FailureMode::A1JacobianSingular;
    w.dtau_dy = best_dy;
    w.detail = "no y_j direction moves sigma1 at the corner; block Jacobian singular";
    return w;
  }

  const double theta = 2.0 / best_dy;
  const double t0 = std::min(1e-3, 0.5 * rho / std::max(1.0, theta));
  return scan_leaves_m(
      [&](double t) {
        const Vec x = Vec::Constant(n, t);
        Vec y = Vec::Zero(n);
        y[best_j] = -theta * t;
        return eval_s(x, y);
      },
      theta, best_dy, t0);
}

}  // namespace polydiff
