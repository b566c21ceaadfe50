// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "builders.hpp"
#include "polydiff/io.hpp"

using namespace polydiff;
using namespace polydiff::testing;

TEST_CASE("rational parsing") {
  CHECK(rat_from_string("2/3") == Rat(2, 3));
  CHECK(rat_from_string("-7") == Rat(-7));
  CHECK(rat_from_string("-4/6") == Rat(-2, 3));
  CHECK(rat_from_json(json(5)) == Rat(5));
  CHECK_THROWS_AS(rat_from_string("1/0"), Error);
  CHECK_THROWS_AS(rat_from_string("abc"), Error);
  CHECK_THROWS_AS(rat_from_json(json(0.5)), Error);
  CHECK(rat_to_string(Rat(2, 3)) == "2/3");
  CHECK(rat_to_string(Rat(4)) == "4");
}

TEST_CASE("polytope JSON round trip") {
  auto P = make_triangle();
  const json j = polytope_to_json(*P);
  auto Q = polytope_from_json(j);
  REQUIRE(Q->halfspaces().size() == P->halfspaces().size());
  for (std::size_t i = 0; i < P->halfspaces().size(); ++i) {
    CHECK(Q->halfspaces()[i].normal == P->halfspaces()[i].normal);
    CHECK(Q->halfspaces()[i].offset == P->halfspaces()[i].offset);
  }
}

TEST_CASE("lattice export lists every face") {
  auto P = make_square();
  const json j = lattice_to_json(*P);
  CHECK(j.size() == 9);
  int verts = 0;
  for (const auto& f : j)
    if (f.at("dim") == 0) ++verts;
  CHECK(verts == 4);
}

TEST_CASE("field JSON round trips") {
  auto P = make_square();
  SUBCASE("affine") {
    Mat A(2, 2);
    A << 0.25, -0.1, 0.0, 0.125;
    const auto f = VectorField::affine(P, A, (Vec(2) << 0.5, -0.25).finished());
    const auto g = field_from_json(field_to_json(f), P);
    for (const Vec& x : P->sample(P->lattice().top(), 10, 1))
      CHECK((f.eval(x) - g.eval(x)).norm() == 0.0);
  }
  SUBCASE("polynomial") {
    PolyD p0(2);
    p0.add_term({1, 0}, 0.4);
    p0.add_term({2, 0}, -0.4);
    const auto f = VectorField::polynomial(P, {p0, PolyD(2)});
    const auto g = field_from_json(field_to_json(f), P);
    for (const Vec& x : P->sample(P->lattice().top(), 10, 2))
      CHECK((f.eval(x) - g.eval(x)).norm() == 0.0);
  }
  SUBCASE("composite re-gates g on parse") {
    PolyD p0(2);
    p0.add_term({1, 0}, 0.4);
    p0.add_term({2, 0}, -0.4);
    const auto base = VectorField::polynomial(P, {p0, PolyD(2)});
    const auto f = rho(gate(base), base);
    const auto g = field_from_json(field_to_json(f), P);
    for (const Vec& x : P->sample(P->lattice().top(), 10, 3))
      CHECK((f.eval(x) - g.eval(x)).norm() <= 1e-15);
  }
  SUBCASE("unknown kind") {
    CHECK_THROWS_AS(field_from_json(json{{"kind", "fourier"}}, P), Error);
  }
}

TEST_CASE("diffeo JSON round trips with admission") {
  auto P = make_square();
  PolyD p0(2);
  p0.add_term({1, 0}, 0.4);
  p0.add_term({2, 0}, -0.4);
  const auto field = VectorField::polynomial(P, {p0, PolyD(2)});
  const Diffeo d =
      Diffeo::try_near_identity(field).inverse().compose(square_rotation(P));
  const Diffeo parsed = diffeo_from_json(diffeo_to_json(d), P);
  REQUIRE(parsed.word().size() == d.word().size());
  for (const Vec& x : P->sample(P->lattice().top(), 20, 4))
    CHECK((parsed.eval(x) - d.eval(x)).norm() <= 1e-12);
}

TEST_CASE("rejected letters abort diffeo parsing") {
  auto P = make_square();
  const json too_strong{
      {"near_identity",
       json{{"kind", "polynomial"},
            {"components",
             json::array({json::array({json{{"exp", {1, 0}}, {"coef", 1.2}},
                                       json{{"exp", {2, 0}}, {"coef", -1.2}}}),
                          json::array()})}}}};
  CHECK_THROWS_AS(diffeo_from_json(json::array({too_strong}), P), Error);
}

TEST_CASE("candidate and witness JSON") {
  const json j{{"tau", json::array({json{{"exp", {1, 0}}, {"coef", 1.0}},
                                    json{{"exp", {0, 1}}, {"coef", 1.0}}})},
               {"description", "x+y"},
               {"domain_radius", 0.5}};
  const auto c = candidate_from_json(j);
  CHECK(c.domain_radius == 0.5);
  CHECK(c.tau.degree() == 1);
  FalsificationWitness w;
  w.failure_mode = FailureMode::LeavesM;
  w.theta = 2;
  w.t = 1e-3;
  w.h_value = -1e-3;
  const json out = witness_to_json(w);
  CHECK(out.at("failure_mode") == "leaves_M");
  CHECK(out.at("theta") == 2.0);
}

TEST_CASE("format_double survives a round trip") {
  for (double x : {0.1, 1.0 / 3.0, 0.40589255650988793, -2.5e-17}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("bad files raise Parse errors") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/path.json"), Error);
  CHECK_THROWS_AS(polytope_from_json(json{{"dim", 2}}), Error);
}

TEST_CASE("fractional halfspace data flows through the exact kernel") {
  // Octahedron scaled by 3/2: same combinatorics, fractional offsets.
  json hs = json::array();
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      for (int sz = -1; sz <= 1; sz += 2)
        hs.push_back(json{{"a", {sx, sy, sz}}, {"b", "3/2"}});
  auto P = polytope_from_json(json{{"dim", 3}, {"halfspaces", hs}})->canonicalize();
  const auto& lat = P->lattice();
  CHECK(lat.n_faces() == 27);
  CHECK(lat.faces_of_dim(0).size() == 6);
  CHECK(lat.vertex(0).size() == 3);
  // Vertices are at distance 3/2 along the axes.
  bool found = false;
  for (int v = 0; v < lat.n_vertices(); ++v) {
    if (lat.vertex(v) == VecQ{Rat(3, 2), Rat(0), Rat(0)}) found = true;
  }
  CHECK(found);
}
