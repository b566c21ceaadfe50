// SPDX-License-Identifier: Apache-2.0

#include "polydiff/io.hpp"

#include <cstdio>
#include <fstream>

#include "polydiff/errors.hpp"

namespace polydiff {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::Parse, std::string("missing key '") + key + "'");
  return j.at(key);
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::Parse, "expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Mat mat_from_json(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw Error(ErrorKind::Parse, "matrix has wrong row count");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Vec row = vec_from_json(j[r]);
    if (row.size() != cols) throw Error(ErrorKind::Parse, "matrix has ragged rows");
    m.row(r) = row;
  }
  return m;
}

json mat_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_to_json(m.row(r)));
  return out;
}

PolyD poly_from_json(const json& j, int nvars) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "polynomial must be a term list");
  PolyD p(nvars);
  for (const auto& term : j) {
    const json& je = require(term, "exp");
    if (!je.is_array() || static_cast<int>(je.size()) != nvars)
      throw Error(ErrorKind::Parse, "exponent tuple has wrong length");
    std::vector<int> exp(nvars);
    for (int k = 0; k < nvars; ++k) {
      if (!je[k].is_number_integer() || je[k].get<int>() < 0)
        throw Error(ErrorKind::Parse, "exponents must be nonnegative integers");
      exp[k] = je[k].get<int>();
    }
    const json& jc = require(term, "coef");
    if (!jc.is_number()) throw Error(ErrorKind::Parse, "coefficient must be a number");
    p.add_term(std::move(exp), jc.get<double>());
  }
  return p;
}

json poly_to_json(const PolyD& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) out.push_back(json{{"exp", e}, {"coef", c}});
  return out;
}

}  // namespace

Rat rat_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  throw Error(ErrorKind::Parse, "rationals must be integers or \"p/q\" strings");
}

json rat_to_json(const Rat& r) { return json(rat_to_string(r)); }

std::shared_ptr<const Polytope> polytope_from_json(const json& j) {
  const json& jd = require(j, "dim");
  if (!jd.is_number_integer()) throw Error(ErrorKind::Parse, "dim must be an integer");
  const int n = jd.get<int>();
  const json& jh = require(j, "halfspaces");
  if (!jh.is_array() || jh.empty())
    throw Error(ErrorKind::Parse, "halfspaces must be a non-empty array");
  std::vector<Halfspace> hs;
  for (const auto& item : jh) {
    const json& ja = require(item, "a");
    if (!ja.is_array() || static_cast<int>(ja.size()) != n)
      throw Error(ErrorKind::Parse, "normal has wrong length");
    Halfspace h;
    h.normal.reserve(n);
    for (const auto& coord : ja) h.normal.push_back(rat_from_json(coord));
    h.offset = rat_from_json(require(item, "b"));
    hs.push_back(std::move(h));
  }
  return Polytope::make(n, std::move(hs));
}

json polytope_to_json(const Polytope& P) {
  json jh = json::array();
  for (const auto& h : P.halfspaces()) {
    json ja = json::array();
    for (const auto& a : h.normal) ja.push_back(rat_to_json(a));
    jh.push_back(json{{"a", ja}, {"b", rat_to_json(h.offset)}});
  }
  return json{{"dim", P.dim()}, {"halfspaces", jh}};
}

json lattice_to_json(const Polytope& P) {
  const FaceLattice& lat = P.lattice();
  json out = json::array();
  for (int id = 0; id < lat.n_faces(); ++id) {
    const Face& f = lat.face(id);
    json verts = json::array();
    for (int vid : f.vertices) {
      json coords = json::array();
      for (const auto& c : lat.vertex(vid)) coords.push_back(rat_to_json(c));
      verts.push_back(std::move(coords));
    }
    out.push_back(json{{"active", f.active}, {"dim", f.dim}, {"vertices", verts}});
  }
  return out;
}

VectorField field_from_json(const json& j, std::shared_ptr<const Polytope> P) {
  const std::string kind = require(j, "kind").get<std::string>();
  const int n = P->dim();
  if (kind == "affine") {
    Mat A = mat_from_json(require(j, "A"), n, n);
    Vec b = vec_from_json(require(j, "b"));
    if (b.size() != n) throw Error(ErrorKind::Parse, "b has wrong length");
    return VectorField::affine(std::move(P), std::move(A), std::move(b));
  }
  if (kind == "polynomial") {
    const json& jc = require(j, "components");
    if (!jc.is_array() || static_cast<int>(jc.size()) != n)
      throw Error(ErrorKind::Parse, "need one component per coordinate");
    std::vector<PolyD> comps;
    comps.reserve(n);
    for (const auto& comp : jc) comps.push_back(poly_from_json(comp, n));
    return VectorField::polynomial(std::move(P), std::move(comps));
  }
  if (kind == "composite") {
    const GatedField g = gate(field_from_json(require(j, "g"), P));
    return rho(g, field_from_json(require(j, "f"), P));
  }
  if (kind == "inverse_chart") {
    return inverse_chart(gate(field_from_json(require(j, "g"), P)));
  }
  throw Error(ErrorKind::Parse, "unknown field kind '" + kind + "'");
}

json field_to_json(const VectorField& f) {
  switch (f.kind()) {
    case VectorField::Kind::Affine:
      return json{
          {"kind", "affine"}, {"A", mat_to_json(f.affine_A())}, {"b", vec_to_json(f.affine_b())}};
    case VectorField::Kind::Polynomial: {
      json comps = json::array();
      for (const auto& p : f.poly_components()) comps.push_back(poly_to_json(p));
      return json{{"kind", "polynomial"}, {"components", comps}};
    }
    case VectorField::Kind::Composite:
      return json{{"kind", "composite"},
                  {"g", field_to_json(f.composite_g())},
                  {"f", field_to_json(f.composite_f())}};
    case VectorField::Kind::InverseChart:
      return json{{"kind", "inverse_chart"}, {"g", field_to_json(f.inverse_g())}};
  }
  throw std::logic_error("unreachable");
}

Diffeo diffeo_from_json(const json& j, std::shared_ptr<const Polytope> P) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "diffeo must be a letter list");
  Diffeo out = Diffeo::identity(P);
  for (const auto& letter : j) {
    if (letter.contains("near_identity")) {
      out = out.compose(Diffeo::try_near_identity(field_from_json(letter.at("near_identity"), P)));
    } else if (letter.contains("inverse_of")) {
      out = out.compose(
          Diffeo::try_near_identity(field_from_json(letter.at("inverse_of"), P)).inverse());
    } else if (letter.contains("affine")) {
      const json& ja = letter.at("affine");
      const Mat L = mat_from_json(require(ja, "L"), P->dim(), P->dim());
      const Vec t = vec_from_json(require(ja, "t"));
      out = out.compose(Diffeo::affine_symmetry(L, t, P));
    } else {
      throw Error(ErrorKind::Parse, "unknown letter kind");
    }
  }
  return out;
}

json diffeo_to_json(const Diffeo& d) {
  json out = json::array();
  for (const auto& letter : d.word()) {
    switch (letter.kind) {
      case Diffeo::Letter::Kind::NearIdentity:
        out.push_back(json{{"near_identity", field_to_json(letter.gated->field)}});
        break;
      case Diffeo::Letter::Kind::InverseNearIdentity:
        out.push_back(json{{"inverse_of", field_to_json(letter.gated->field)}});
        break;
      case Diffeo::Letter::Kind::AffineSymmetry:
        out.push_back(json{
            {"affine", json{{"L", mat_to_json(letter.L)}, {"t", vec_to_json(letter.t)}}}});
        break;
    }
  }
  return out;
}

LocalAdditionCandidate candidate_from_json(const json& j) {
  LocalAdditionCandidate c;
  c.tau = poly_from_json(require(j, "tau"), 2);
  if (j.contains("domain_radius")) {
    if (!j.at("domain_radius").is_number() || j.at("domain_radius").get<double>() <= 0)
      throw Error(ErrorKind::Parse, "domain_radius must be positive");
    c.domain_radius = j.at("domain_radius").get<double>();
  }
  if (j.contains("description")) c.description = j.at("description").get<std::string>();
  return c;
}

json witness_to_json(const FalsificationWitness& w) {
  return json{{"failure_mode", failure_mode_name(w.failure_mode)},
              {"theta", w.theta},
              {"t", w.t},
              {"h_value", w.h_value},
              {"dtau_dy", w.dtau_dy},
              {"detail", w.detail}};
}

json error_to_json(const Error& e) {
  return json{{"error", e.name()}, {"message", e.what()}};
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

void save_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace polydiff
