// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "polydiff/diffeo.hpp"
#include "polydiff/errors.hpp"
#include "polydiff/fields.hpp"
#include "polydiff/lemma_lab.hpp"
#include "polydiff/polytope.hpp"

namespace polydiff {

using json = nlohmann::json;

// Rationals travel as strings "p/q" or plain integers.
Rat rat_from_json(const json& j);
json rat_to_json(const Rat& r);

// {"dim": n, "halfspaces": [{"a": ["1","0"], "b": "1"}, ...]}
// The returned polytope is validated but not canonicalized.
std::shared_ptr<const Polytope> polytope_from_json(const json& j);
json polytope_to_json(const Polytope& P);

// [{"active": [...], "dim": d, "vertices": [["0","1"], ...]}, ...]
json lattice_to_json(const Polytope& P);

// {"kind":"affine","A":[[...]],"b":[...]} |
// {"kind":"polynomial","components":[[{"exp":[1,0],"coef":0.4},...],[]]} |
// {"kind":"composite","g":...,"f":...} (g is gated on parse)
VectorField field_from_json(const json& j, std::shared_ptr<const Polytope> P);
json field_to_json(const VectorField& f);

// Ordered letter list: {"near_identity": <field>} | {"inverse_of": <field>} |
// {"affine": {"L": [[...]], "t": [...]}}. Near-identity letters are admitted
// through the gate while parsing.
Diffeo diffeo_from_json(const json& j, std::shared_ptr<const Polytope> P);
json diffeo_to_json(const Diffeo& d);

// {"tau":[{"exp":[1,0],"coef":1.0},...],"description":"...","domain_radius":r?}
LocalAdditionCandidate candidate_from_json(const json& j);
json witness_to_json(const FalsificationWitness& w);

json error_to_json(const Error& e);

// Full-precision decimal (17 significant digits) for reproducible output.
std::string format_double(double x);

json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);

}  // namespace polydiff
