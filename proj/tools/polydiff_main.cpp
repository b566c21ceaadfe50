// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "polydiff/diffeo.hpp"
#include "polydiff/errors.hpp"
#include "polydiff/fields.hpp"
#include "polydiff/io.hpp"
#include "polydiff/lemma_lab.hpp"
#include "polydiff/polytope.hpp"

namespace {

using namespace polydiff;

struct RunConfig {
  double tol_active = kTolActive;
  double tol_inv = kTolInv;
  std::uint64_t seed = 42;
  int samples = 16;
  std::string format = "text";
  std::string out_path;
  std::string grid_spec;
  std::string points_path;
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--tol-active", cfg.tol_active, "active-set tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-inv", cfg.tol_inv, "inversion tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "sampling seed");
  cmd->add_option("--samples", cfg.samples, "samples (or pairs) per check")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("-o,--out", cfg.out_path, "write output to a file");
}

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out_path.empty()) {
    std::cout << content;
  } else {
    save_text_file(cfg.out_path, content);
  }
}

std::shared_ptr<const Polytope> load_polytope(const std::string& path) {
  return polytope_from_json(load_json_file(path))->canonicalize();
}

// Grid spec "k" (same count on every axis) or "k1xk2x..."; points are laid
// over the bounding box and filtered to the polytope.
std::vector<Vec> grid_points(const Polytope& P, const std::string& spec, double tol) {
  const int n = P.dim();
  std::vector<long> counts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      counts.push_back(std::stol(part));
    } catch (...) {
      throw Error(ErrorKind::Parse, "bad grid spec '" + spec + "'");
    }
    if (counts.back() < 1) throw Error(ErrorKind::Parse, "grid counts must be >= 1");
  }
  if (counts.size() == 1) counts.assign(n, counts[0]);
  if (static_cast<int>(counts.size()) != n)
    throw Error(ErrorKind::Parse, "grid spec must give one count or one per axis");

  const auto [lo, hi] = P.bounding_box();
  std::vector<Vec> pts;
  std::vector<long> idx(n, 0);
  Vec x(n);
  for (;;) {
    for (int k = 0; k < n; ++k) {
      const double t = counts[k] > 1 ? static_cast<double>(idx[k]) / (counts[k] - 1) : 0.5;
      x[k] = lo[k] + t * (hi[k] - lo[k]);
    }
    if (P.contains(x, tol)) pts.push_back(x);
    int k = n - 1;
    while (k >= 0 && ++idx[k] == counts[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return pts;
}

std::vector<Vec> points_from_csv(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::vector<Vec> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) < n)
      throw Error(ErrorKind::Parse, "row with fewer than dim columns in '" + path + "'");
    Vec x(n);
    for (int k = 0; k < n; ++k) x[k] = row[k];
    pts.push_back(x);
  }
  return pts;
}

std::string map_report(const RunConfig& cfg, const Polytope& P,
                       const std::vector<Vec>& ins, const std::vector<Vec>& outs) {
  for (const Vec& y : outs) {
    if (!P.contains(y, 10 * cfg.tol_active))
      throw Error(ErrorKind::InternalInvariantViolation, "image point left the polytope");
  }
  std::ostringstream os;
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < ins.size(); ++i) {
      json jin = json::array(), jout = json::array();
      for (Eigen::Index k = 0; k < ins[i].size(); ++k) jin.push_back(ins[i][k]);
      for (Eigen::Index k = 0; k < outs[i].size(); ++k) jout.push_back(outs[i][k]);
      rows.push_back(json{{"in", jin}, {"out", jout}});
    }
    os << rows.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < ins.size(); ++i) {
      for (Eigen::Index k = 0; k < ins[i].size(); ++k)
        os << (k ? "," : "") << format_double(ins[i][k]);
      for (Eigen::Index k = 0; k < outs[i].size(); ++k)
        os << "," << format_double(outs[i][k]);
      os << "\n";
    }
  }
  return os.str();
}

int cmd_faces(const RunConfig& cfg, const std::string& poly_path) {
  const auto P = load_polytope(poly_path);
  if (cfg.format == "json") {
    emit(cfg, lattice_to_json(*P).dump(2) + "\n");
    return 0;
  }
  const auto& lat = P->lattice();
  std::ostringstream os;
  os << "dims:";
  for (int d = 0; d <= P->dim(); ++d) os << " " << d << ":" << lat.faces_of_dim(d).size();
  os << "\nstrata:";
  for (int i = 0; i <= P->dim(); ++i) os << " " << i << ":" << P->stratum(i).size();
  os << "\n";
  emit(cfg, os.str());
  return 0;
}

int cmd_strata(const RunConfig& cfg, const std::string& poly_path, int which) {
  const auto P = load_polytope(poly_path);
  const auto& lat = P->lattice();
  std::ostringstream os;
  json jall = json::array();
  for (int i = 0; i <= P->dim(); ++i) {
    if (which >= 0 && i != which) continue;
    const auto ids = P->stratum(i);
    if (cfg.format == "json") {
      json faces = json::array();
      for (int id : ids) {
        const Face& f = lat.face(id);
        faces.push_back(json{{"active", f.active}, {"dim", f.dim}});
      }
      jall.push_back(json{{"index", i}, {"faces", faces}});
    } else {
      os << "stratum " << i << " (" << ids.size() << " faces of dim " << P->dim() - i
         << "):";
      for (int id : ids) {
        os << " {";
        const Face& f = lat.face(id);
        for (std::size_t k = 0; k < f.active.size(); ++k) os << (k ? "," : "") << f.active[k];
        os << "}";
      }
      os << "\n";
    }
  }
  emit(cfg, cfg.format == "json" ? jall.dump(2) + "\n" : os.str());
  return 0;
}

int cmd_gate(const RunConfig& cfg, const std::string& poly_path,
             const std::string& field_path) {
  const auto P = load_polytope(poly_path);
  const VectorField f = field_from_json(load_json_file(field_path), P);
  SupOptions opts;
  opts.strat_samples_per_face = cfg.samples;
  opts.seed = cfg.seed;
  try {
    const GatedField gf = gate(f, opts);
    const char* mode = gf.cert.mode == NormMode::Exact
                           ? "exact"
                           : (gf.cert.mode == NormMode::Certified ? "certified" : "estimate");
    if (cfg.format == "json") {
      json levels = json::array();
      for (const auto& [h, bound] : gf.cert.levels)
        levels.push_back(json{{"mesh", h}, {"bound", bound}});
      emit(cfg, json{{"accepted", true},
                     {"q", gf.cert.q},
                     {"mode", mode},
                     {"stratified", gf.cert.stratified},
                     {"levels", levels}}
                        .dump(2) +
                    "\n");
    } else {
      std::ostringstream os;
      os << "ACCEPTED q=" << format_double(gf.cert.q) << " mode=" << mode
         << " stratified=" << (gf.cert.strat.symbolic ? "symbolic" : "sampled") << "\n";
      emit(cfg, os.str());
    }
    return 0;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotStratified && e.kind() != ErrorKind::GateNotSatisfied)
      throw;
    emit(cfg, std::string("REJECTED ") + e.what() + "\n");
    return e.exit_code();
  }
}

int cmd_map(const RunConfig& cfg, const std::string& poly_path,
            const std::string& diffeo_path, bool inverse) {
  const auto P = load_polytope(poly_path);
  Diffeo d = diffeo_from_json(load_json_file(diffeo_path), P);
  if (inverse) d = d.inverse();
  std::vector<Vec> ins;
  if (!cfg.points_path.empty()) {
    ins = points_from_csv(cfg.points_path, P->dim());
  } else if (!cfg.grid_spec.empty()) {
    ins = grid_points(*P, cfg.grid_spec, cfg.tol_active);
  } else {
    throw Error(ErrorKind::Parse, "need --grid or --points");
  }
  std::vector<Vec> outs;
  outs.reserve(ins.size());
  for (const Vec& x : ins) outs.push_back(d.eval(x, cfg.tol_inv));
  emit(cfg, map_report(cfg, *P, ins, outs));
  return 0;
}

int cmd_compose(const RunConfig& cfg, const std::string& poly_path,
                const std::string& d1_path, const std::string& d2_path) {
  const auto P = load_polytope(poly_path);
  const Diffeo d1 = diffeo_from_json(load_json_file(d1_path), P);
  const Diffeo d2 = diffeo_from_json(load_json_file(d2_path), P);
  emit(cfg, diffeo_to_json(d1.compose(d2)).dump(2) + "\n");
  return 0;
}

int cmd_check_der_to_face(const RunConfig& cfg, const std::string& poly_path,
                          const std::string& curve_path) {
  const auto P = load_polytope(poly_path);
  const json j = load_json_file(curve_path);
  if (!j.contains("x0") || !j.contains("v") || !j.contains("t_max"))
    throw Error(ErrorKind::Parse, "curve file needs x0, v, t_max (w optional)");
  auto getvec = [&](const char* key) {
    const json& arr = j.at(key);
    Vec v(P->dim());
    for (int k = 0; k < P->dim(); ++k) v[k] = arr.at(k).get<double>();
    return v;
  };
  const Vec x0 = getvec("x0"), v = getvec("v");
  const Vec w = j.contains("w") ? getvec("w") : Vec(Vec::Zero(P->dim()));
  const double t_max = j.at("t_max").get<double>();
  const DerToFaceReport rep = check_der_to_face(*P, x0, v, w, t_max, cfg.tol_active);
  std::ostringstream os;
  os << (rep.pass ? "PASS" : "FAIL") << " epsilon=" << format_double(rep.epsilon) << "\n";
  emit(cfg, os.str());
  return rep.pass ? 0 : 5;
}

int cmd_check_face_into_face(const RunConfig& cfg, const std::string& poly_path,
                             const std::string& diffeo_path) {
  const auto P = load_polytope(poly_path);
  const Diffeo d = diffeo_from_json(load_json_file(diffeo_path), P);
  const FaceIntoFaceReport rep = check_face_into_face(d, cfg.samples, cfg.seed);
  std::ostringstream os;
  os << (rep.pass ? "PASS" : "FAIL") << " faces=" << rep.faces_checked
     << " points=" << rep.points_checked
     << " max_inclusion_residual=" << format_double(rep.max_inclusion_residual);
  if (rep.first_failure) os << " failure=\"" << *rep.first_failure << "\"";
  os << "\n";
  emit(cfg, os.str());
  return rep.pass ? 0 : 5;
}

int cmd_check_lip_inverse(const RunConfig& cfg, const std::string& poly_path,
                          const std::string& field_path) {
  const auto P = load_polytope(poly_path);
  const VectorField f = field_from_json(load_json_file(field_path), P);
  const GateCertificate cert = sup_op_norm(
      f, f.kind() == VectorField::Kind::Affine ? NormMode::Exact : NormMode::Certified);
  if (!(cert.q < 1.0))
    throw Error(ErrorKind::GateNotSatisfied, "Lip(f) bound q=" + format_double(cert.q));
  const LipInverseReport rep = check_lip_inverse(f, cert.q, cfg.samples, cfg.seed);
  std::ostringstream os;
  os << (rep.pass ? "PASS" : "FAIL") << " q=" << format_double(rep.q)
     << " bound=" << format_double(rep.bound)
     << " empirical=" << format_double(rep.empirical_max) << " pairs=" << rep.pairs << "\n";
  emit(cfg, os.str());
  return rep.pass ? 0 : 5;
}

int cmd_falsify(const RunConfig& cfg, const std::string& candidate_path) {
  const LocalAdditionCandidate c = candidate_from_json(load_json_file(candidate_path));
  const FalsificationWitness w = falsify_local_addition(c);
  emit(cfg, witness_to_json(w).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"face-respecting diffeomorphisms of convex polytopes"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::string poly_path, field_path, diffeo_path, d2_path, curve_path, candidate_path;
  int stratum_index = -1;

  auto* faces = app.add_subcommand("faces", "face counts by dimension and strata");
  faces->add_option("polytope", poly_path)->required();
  add_common_flags(faces, cfg);

  auto* strata = app.add_subcommand("strata", "faces of each stratum");
  strata->add_option("polytope", poly_path)->required();
  strata->add_option("-i,--index", stratum_index, "only this stratum");
  add_common_flags(strata, cfg);

  auto* gate_cmd = app.add_subcommand("gate", "run the admission gate on a field");
  gate_cmd->add_option("polytope", poly_path)->required();
  gate_cmd->add_option("field", field_path)->required();
  add_common_flags(gate_cmd, cfg);

  auto* warp = app.add_subcommand("warp", "map grid points through a diffeomorphism");
  warp->add_option("polytope", poly_path)->required();
  warp->add_option("diffeo", diffeo_path)->required();
  warp->add_option("--grid", cfg.grid_spec, "points per axis, e.g. 5 or 5x5");
  warp->add_option("--points", cfg.points_path, "CSV of input points");
  add_common_flags(warp, cfg);

  auto* inv = app.add_subcommand("invert", "map points through the inverse");
  inv->add_option("polytope", poly_path)->required();
  inv->add_option("diffeo", diffeo_path)->required();
  inv->add_option("--grid", cfg.grid_spec, "points per axis, e.g. 5 or 5x5");
  inv->add_option("--points", cfg.points_path, "CSV of input points");
  add_common_flags(inv, cfg);

  auto* comp = app.add_subcommand("compose", "concatenate two diffeomorphism words");
  comp->add_option("polytope", poly_path)->required();
  comp->add_option("d1", diffeo_path)->required();
  comp->add_option("d2", d2_path)->required();
  add_common_flags(comp, cfg);

  auto* check = app.add_subcommand("check", "run a lemma checker");
  check->require_subcommand(1);
  auto* dtf = check->add_subcommand("der-to-face", "tangent rays stay in the polytope");
  dtf->add_option("polytope", poly_path)->required();
  dtf->add_option("curve", curve_path)->required();
  add_common_flags(dtf, cfg);
  auto* fif = check->add_subcommand("face-into-face", "derivatives map tangent spans");
  fif->add_option("polytope", poly_path)->required();
  fif->add_option("diffeo", diffeo_path)->required();
  add_common_flags(fif, cfg);
  auto* lip = check->add_subcommand("lip-inverse", "Lipschitz bound for the inverse");
  lip->add_option("polytope", poly_path)->required();
  lip->add_option("field", field_path)->required();
  add_common_flags(lip, cfg);

  auto* fal = app.add_subcommand("falsify", "run the local-addition falsifier");
  fal->add_option("candidate", candidate_path)->required();
  add_common_flags(fal, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (faces->parsed()) return cmd_faces(cfg, poly_path);
    if (strata->parsed()) return cmd_strata(cfg, poly_path, stratum_index);
    if (gate_cmd->parsed()) return cmd_gate(cfg, poly_path, field_path);
    if (warp->parsed()) return cmd_map(cfg, poly_path, diffeo_path, false);
    if (inv->parsed()) return cmd_map(cfg, poly_path, diffeo_path, true);
    if (comp->parsed()) return cmd_compose(cfg, poly_path, diffeo_path, d2_path);
    if (dtf->parsed()) return cmd_check_der_to_face(cfg, poly_path, curve_path);
    if (fif->parsed()) return cmd_check_face_into_face(cfg, poly_path, diffeo_path);
    if (lip->parsed()) return cmd_check_lip_inverse(cfg, poly_path, field_path);
    if (fal->parsed()) return cmd_falsify(cfg, candidate_path);
  } catch (const polydiff::Error& e) {
    std::cerr << polydiff::error_to_json(e).dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 5;
  }
  return 0;
}
