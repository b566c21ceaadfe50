// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "builders.hpp"
#include "generators.hpp"
#include "polydiff/errors.hpp"

using namespace polydiff;
using namespace polydiff::testing;

namespace {

Vec pt(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

VectorField parabola_field(std::shared_ptr<const Polytope> P, double c = 0.4) {
  PolyD p0(2);
  p0.add_term({1, 0}, c);
  p0.add_term({2, 0}, -c);
  return VectorField::polynomial(std::move(P), {p0, PolyD(2)});
}

// 1-d bisection oracle for x + c x (1 - x) = y on [0, 1].
double bisect_preimage(double c, double y) {
  double lo = 0, hi = 1;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = mid + c * mid * (1 - mid);
    (val < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Mat fd_jacobian_of(const Diffeo& d, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Mat J(n, n);
  for (int e = 0; e < n; ++e) {
    Vec hi = x, lo = x;
    hi[e] += h;
    lo[e] -= h;
    J.col(e) = (d.eval(hi, 1e-13) - d.eval(lo, 1e-13)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("admission gate") {
  auto P = make_square();
  SUBCASE("gentle parabola is accepted") {
    const Diffeo d = Diffeo::try_near_identity(parabola_field(P));
    CHECK(d.chart().cert.q >= 0.4 - 1e-12);
    CHECK(d.chart().cert.q < 0.5);
  }
  SUBCASE("steep parabola is rejected with its bound") {
    try {
      Diffeo::try_near_identity(parabola_field(P, 1.2));
      FAIL("expected GateNotSatisfied");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GateNotSatisfied);
      CHECK(std::string(e.what()).find("q=1.2") != std::string::npos);
    }
  }
  SUBCASE("constant field is rejected as not stratified") {
    const auto f =
        VectorField::affine(P, Mat::Zero(2, 2), (Vec(2) << 0.1, 0.0).finished());
    try {
      Diffeo::try_near_identity(f);
      FAIL("expected NotStratified");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotStratified);
    }
  }
  SUBCASE("zero field gives the identity") {
    const Diffeo d = Diffeo::try_near_identity(VectorField::zero(P));
    const Vec x = pt(0.25, 0.75);
    CHECK((d.eval(x) - x).norm() == 0.0);
  }
}

TEST_CASE("affine symmetries") {
  auto P = make_square();
  SUBCASE("quarter rotation is admitted") { (void)square_rotation(P); }
  SUBCASE("identity is admitted") {
    (void)Diffeo::affine_symmetry(Mat::Identity(2, 2), Vec::Zero(2), P);
  }
  SUBCASE("scaling is rejected") {
    CHECK_THROWS_AS(Diffeo::affine_symmetry(2 * Mat::Identity(2, 2), Vec::Zero(2), P),
                    Error);
  }
}

TEST_CASE("word evaluation") {
  auto P = make_square();
  SUBCASE("near-identity letter") {
    const Diffeo d = Diffeo::try_near_identity(parabola_field(P));
    CHECK((d.eval(pt(0.5, 0.5)) - pt(0.6, 0.5)).norm() < 1e-15);
  }
  SUBCASE("vertices are fixed by face-respecting words") {
    const Diffeo d = Diffeo::try_near_identity(parabola_field(P));
    for (const Vec& v : P->vertices_d()) CHECK((d.eval(v) - v).norm() == 0.0);
    const Diffeo dinv = d.inverse();
    for (const Vec& v : P->vertices_d()) CHECK((dinv.eval(v) - v).norm() == 0.0);
  }
  SUBCASE("rotation letter") {
    const Diffeo rot = square_rotation(P);
    CHECK((rot.eval(pt(0, 0)) - pt(0, 1)).norm() == 0.0);
  }
}

TEST_CASE("invert_point against a bisection oracle") {
  auto P = make_square();
  const auto gf = gate(parabola_field(P));
  SUBCASE("spec example") {
    const Vec x = invert_point(gf, pt(0.6, 0.5));
    CHECK((x - pt(0.5, 0.5)).norm() < 1e-9);
  }
  SUBCASE("oracle on random targets") {
    for (const Vec& y : P->sample(P->lattice().top(), 25, 51)) {
      const Vec x = invert_point(gf, y);
      CHECK(x[0] == doctest::Approx(bisect_preimage(0.4, y[0])).epsilon(1e-9));
      CHECK(x[1] == doctest::Approx(y[1]).epsilon(1e-12));
    }
  }
  SUBCASE("zero field maps back to the target") {
    const auto zf = gate(VectorField::zero(P));
    const Vec y = pt(0.3, 0.9);
    CHECK((invert_point(zf, y) - y).norm() <= 1e-12);
  }
  SUBCASE("vertices invert to themselves") {
    for (const Vec& v : P->vertices_d()) CHECK((invert_point(gf, v) - v).norm() == 0.0);
  }
}

TEST_CASE("word Jacobians") {
  auto P = make_square();
  // f = (0.3 x (1-x), 0.2 y (1-y)) is stratified and f'(0,0) = diag(0.3, 0.2).
  PolyD p0(2), p1(2);
  p0.add_term({1, 0}, 0.3);
  p0.add_term({2, 0}, -0.3);
  p1.add_term({0, 1}, 0.2);
  p1.add_term({0, 2}, -0.2);
  const auto gf = gate(VectorField::polynomial(P, {p0, p1}));
  Mat A(2, 2);
  A << 0.3, 0, 0, 0.2;
  SUBCASE("forward letter at the corner: I + A") {
    const Diffeo d = Diffeo::near_identity(gf);
    CHECK((d.jacobian(pt(0, 0)) - (Mat::Identity(2, 2) + A)).norm() < 1e-15);
  }
  SUBCASE("inverse letter at the corner: (I + A)^{-1}") {
    const Diffeo d = Diffeo::near_identity(gf).inverse();
    Mat expected(2, 2);
    expected << 1.0 / 1.3, 0, 0, 1.0 / 1.2;
    CHECK((d.jacobian(pt(0, 0)) - expected).norm() < 1e-14);
  }
  SUBCASE("empty word: identity matrix") {
    CHECK((Diffeo::identity(P).jacobian(pt(0.1, 0.9)) - Mat::Identity(2, 2)).norm() == 0.0);
  }
  SUBCASE("finite differences across a mixed word") {
    const Diffeo d =
        Diffeo::near_identity(gate(parabola_field(P))).inverse().compose(square_rotation(P));
    for (const Vec& x : P->sample(P->lattice().top(), 10, 77)) {
      const Mat J = d.jacobian(x, 1e-13);
      if (!P->contains(x + Vec::Constant(2, 1e-5), 0) ||
          !P->contains(x - Vec::Constant(2, 1e-5), 0))
        continue;  // keep the stencil inside M
      const Mat Jfd = fd_jacobian_of(d, x, 1e-5);
      CHECK((J - Jfd).norm() <= 1e-5 * std::max(1.0, J.norm()));
    }
  }
}

TEST_CASE("group laws at sample points") {
  auto P = make_square();
  std::mt19937_64 rng(91);
  const auto f = random_gated_field(P, Family::Box, 0.5, rng);
  const auto g = random_gated_field(P, Family::Box, 0.45, rng);
  const Diffeo df = Diffeo::near_identity(f);
  const Diffeo dg = Diffeo::near_identity(g);
  const Diffeo rot = square_rotation(P);
  const auto xs = P->sample(P->lattice().top(), 100, 101);
  SUBCASE("inverse composes to the identity") {
    const Diffeo d = df.compose(rot).compose(dg);
    const Diffeo id1 = d.compose(d.inverse());
    const Diffeo id2 = d.inverse().compose(d);
    for (const Vec& x : xs) {
      CHECK((id1.eval(x) - x).norm() <= 1e-8);
      CHECK((id2.eval(x) - x).norm() <= 1e-8);
    }
  }
  SUBCASE("associativity") {
    const Diffeo left = df.compose(dg).compose(rot);
    const Diffeo right = df.compose(dg.compose(rot));
    for (const Vec& x : xs) CHECK((left.eval(x) - right.eval(x)).norm() <= 1e-10);
  }
  SUBCASE("conjugation by the identity") {
    const Diffeo c = conjugate(Diffeo::identity(P), df);
    for (const Vec& x : xs) CHECK((c.eval(x) - df.eval(x)).norm() <= 1e-10);
  }
  SUBCASE("random words of length up to 4") {
    auto random_word = [&](int len) {
      Diffeo d = Diffeo::identity(P);
      for (int i = 0; i < len; ++i) {
        switch (rng() % 4) {
          case 0: d = d.compose(df); break;
          case 1: d = d.compose(dg.inverse()); break;
          case 2: d = d.compose(rot); break;
          default: d = d.compose(square_reflection(P)); break;
        }
      }
      return d;
    };
    for (int trial = 0; trial < 6; ++trial) {
      const Diffeo a = random_word(1 + rng() % 4);
      const Diffeo b = random_word(1 + rng() % 4);
      const Diffeo c = random_word(1 + rng() % 4);
      const Diffeo lhs = a.compose(b).compose(c);
      const Diffeo rhs = a.compose(b.compose(c));
      const Diffeo round = a.compose(a.inverse());
      for (int s = 0; s < 10; ++s) {
        const Vec& x = xs[(trial * 10 + s) % xs.size()];
        CHECK((lhs.eval(x) - rhs.eval(x)).norm() <= 1e-8);
        CHECK((round.eval(x) - x).norm() <= 1e-8);
      }
    }
  }
}

TEST_CASE("chart product identity") {
  auto P = make_square();
  const auto f = gate(parabola_field(P));
  const auto zero = gate(VectorField::zero(P));
  SUBCASE("neutral elements") {
    const auto r1 = chart_product(f, zero);  // rho_0(f) = f
    const auto r2 = chart_product(zero, f);  // rho_f(0) = f
    for (const Vec& x : P->sample(P->lattice().top(), 20, 3)) {
      CHECK((r1.eval(x) - f.field.eval(x)).norm() <= 1e-14);
      CHECK((r2.eval(x) - f.field.eval(x)).norm() <= 1e-14);
    }
  }
  SUBCASE("spec value at the center") {
    const auto r = chart_product(f, f);
    CHECK((r.eval(pt(0.5, 0.5)) - pt(0.196, 0.0)).norm() < 1e-12);
  }
  SUBCASE("composition minus identity equals the product field") {
    const auto r = chart_product(f, f);
    const Diffeo d = Diffeo::near_identity(f);
    const Diffeo dd = d.compose(d);
    for (const Vec& x : P->sample(P->lattice().top(), 50, 7)) {
      CHECK((dd.eval(x) - x - r.eval(x)).lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }
  SUBCASE("inverse pair collapses to zero") {
    const auto h = gate(inverse_chart(f));  // id + h = (id + f)^{-1}
    const auto r = chart_product(f, h);     // rho_h(f) = 0
    for (const Vec& x : P->sample(P->lattice().top(), 30, 11)) {
      CHECK(r.eval(x).norm() <= 1e-9);
    }
  }
}

TEST_CASE("face permutation") {
  auto P = make_square();
  SUBCASE("near-identity words act trivially") {
    const Diffeo d = Diffeo::try_near_identity(parabola_field(P));
    CHECK(d.face_permutation().is_identity());
  }
  SUBCASE("the quarter rotation is a pair of 4-cycles") {
    const auto perm = square_rotation(P).face_permutation();
    CHECK_FALSE(perm.is_identity());
    const auto cycles = perm.cycles();
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0].size() == 4);
    CHECK(cycles[1].size() == 4);
    CHECK(perm(P->lattice().top()) == P->lattice().top());
  }
  SUBCASE("fourth power is the identity") {
    const Diffeo rot = square_rotation(P);
    CHECK(rot.compose(rot).compose(rot).compose(rot).face_permutation().is_identity());
  }
  SUBCASE("pi is a homomorphism on mixed words") {
    std::mt19937_64 rng(17);
    const Diffeo a =
        square_rotation(P).compose(Diffeo::near_identity(random_gated_field(P, Family::Box, 0.4, rng)));
    const Diffeo b =
        Diffeo::near_identity(random_gated_field(P, Family::Box, 0.5, rng)).compose(square_reflection(P));
    CHECK(a.compose(b).face_permutation() ==
          a.face_permutation().after(b.face_permutation()));
  }
  SUBCASE("conjugating a gated letter by a symmetry stays face-trivial") {
    std::mt19937_64 rng(19);
    const Diffeo d = Diffeo::near_identity(random_gated_field(P, Family::Box, 0.5, rng));
    CHECK(conjugate(square_rotation(P), d).face_permutation().is_identity());
  }
}

TEST_CASE("index and relative interiors are preserved") {
  auto P = make_square();
  std::mt19937_64 rng(23);
  const Diffeo d = Diffeo::near_identity(random_gated_field(P, Family::Box, 0.6, rng))
                       .compose(square_rotation(P))
                       .compose(Diffeo::near_identity(random_gated_field(P, Family::Box, 0.4, rng)).inverse());
  const auto& lat = P->lattice();
  for (int id = 0; id < lat.n_faces(); ++id) {
    const auto pts = lat.face(id).dim == 0
                         ? std::vector<Vec>{lat.vertex_d(lat.face(id).vertices[0])}
                         : P->sample(id, 6, 29);
    for (const Vec& x : pts) {
      const Vec y = d.eval(x);
      CHECK(P->index(y) == P->index(x));
    }
  }
  // Face-respecting words preserve each algebraic interior pointwise.
  const Diffeo face_resp = Diffeo::near_identity(random_gated_field(P, Family::Box, 0.5, rng));
  for (int id = 0; id < lat.n_faces(); ++id) {
    for (const Vec& x : P->sample(id, 4, 31)) {
      CHECK(P->smallest_face_id(face_resp.eval(x)) == id);
    }
  }
}

TEST_CASE("normality of the face kernel") {
  auto P = make_square();
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const Diffeo psi = square_rotation(P).compose(
        Diffeo::near_identity(random_gated_field(P, Family::Box, 0.4, rng)));
    const Diffeo phi = Diffeo::near_identity(random_gated_field(P, Family::Box, 0.5, rng))
                           .compose(square_reflection(P));
    const auto lhs = conjugate(psi, phi).face_permutation();
    const auto rhs = psi.face_permutation()
                         .after(phi.face_permutation())
                         .after(psi.face_permutation().inverse());
    CHECK(lhs == rhs);
  }
}

TEST_CASE("boundary-fixing subgroup") {
  auto P = make_square();
  SUBCASE("field vanishing on the boundary") {
    PolyD p0(2);  // 0.4 x (1-x) y (1-y)
    p0.add_term({1, 1}, 0.4);
    p0.add_term({2, 1}, -0.4);
    p0.add_term({1, 2}, -0.4);
    p0.add_term({2, 2}, 0.4);
    const Diffeo d =
        Diffeo::try_near_identity(VectorField::polynomial(P, {p0, PolyD(2)}));
    CHECK(d.is_boundary_fixing(16));
  }
  SUBCASE("plain parabola moves the bottom edge") {
    const Diffeo d = Diffeo::try_near_identity(parabola_field(P));
    CHECK_FALSE(d.is_boundary_fixing(16));
    CHECK((d.eval(pt(0.5, 0.0)) - pt(0.6, 0.0)).norm() < 1e-15);
  }
  SUBCASE("identity fixes everything") {
    CHECK(Diffeo::identity(P).is_boundary_fixing(8));
  }
}
