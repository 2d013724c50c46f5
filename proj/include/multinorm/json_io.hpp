#pragma once

// JSON serialization for the library's report types.
//
// Schemas:
//   field    : {"modulus": N, "subgroup": [u, ...]}         (full element list)
//   profile  : {"p":, "e":, "exps": [...], "classes":
//                 [{"kind": "frob"|"prime"|"infty", "value":,
//                   "exponents": [...], "pivot_exp":}, ...]}
//   group    : {"invariant_factors": [...], "components": [
//                 {"p":, "e":, "invariant_factors": [...],
//                  "generators": [[...], ...], "ambient_exponents": [...],
//                  "factor_order": [...]}, ...]}
//              (single-component groups also mirror the component fields at
//               top level)
//   verdict  : {"verdict": "solvable"|"obstructed"|"no_local",
//               "witness": place-string or null,
//               "alpha": {"<p>": {"generator_values": [[num, den], ...]}} or null}
//
// import_profile validates the structural invariants and reports
// MalformedProfile on any shape or bound violation.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "multinorm/abelian_q.hpp"
#include "multinorm/base.hpp"
#include "multinorm/brauer.hpp"
#include "multinorm/cyclic_products.hpp"
#include "multinorm/sha_core.hpp"
#include "multinorm/splitting.hpp"

namespace multinorm {

using nlohmann::json;

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonCyclic: return "NonCyclic";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::ModulusTooLarge: return "ModulusTooLarge";
    case ErrorCode::AmbientTooLarge: return "AmbientTooLarge";
    case ErrorCode::MalformedProfile: return "MalformedProfile";
    case ErrorCode::NotCoherent: return "NotCoherent";
    case ErrorCode::WrongExponent: return "WrongExponent";
    case ErrorCode::NoCyclicFactor: return "NoCyclicFactor";
    case ErrorCode::NotLocallySolvable: return "NotLocallySolvable";
    case ErrorCode::NotPrimeDegree: return "NotPrimeDegree";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

inline json field_to_json(const AbelianFieldQ& K) {
  json j;
  j["modulus"] = K.conductor();
  j["subgroup"] = std::vector<int64_t>(K.subgroup_elements().begin(),
                                       K.subgroup_elements().end());
  return j;
}

inline AbelianFieldQ field_from_json(const json& j, const Limits& limits = {}) {
  try {
    int64_t N = j.at("modulus").get<int64_t>();
    std::set<int64_t> elems;
    for (const auto& u : j.at("subgroup")) elems.insert(u.get<int64_t>());
    return AbelianFieldQ::from_subgroup_elements(N, elems, limits);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedProfile, std::string("bad field JSON: ") + e.what());
  }
}

inline json export_profile(const SplittingProfile& pr) {
  json j;
  j["p"] = pr.p;
  j["e"] = pr.e;
  j["exps"] = pr.exps;
  j["classes"] = json::array();
  for (const auto& cls : pr.classes) {
    json c;
    switch (cls.kind) {
      case PlaceClass::Kind::Frob: c["kind"] = "frob"; break;
      case PlaceClass::Kind::Prime: c["kind"] = "prime"; break;
      case PlaceClass::Kind::Infty: c["kind"] = "infty"; break;
    }
    c["value"] = static_cast<int64_t>(cls.value);
    c["exponents"] = cls.exps;
    c["pivot_exp"] = cls.pivot_exp;
    j["classes"].push_back(std::move(c));
  }
  return j;
}

inline SplittingProfile import_profile(const json& j) {
  SplittingProfile pr;
  try {
    pr.p = j.at("p").get<int64_t>();
    pr.e = j.at("e").get<int>();
    pr.exps = j.at("exps").get<std::vector<int>>();
    for (const auto& c : j.at("classes")) {
      PlaceClass cls;
      std::string kind = c.at("kind").get<std::string>();
      if (kind == "frob")
        cls.kind = PlaceClass::Kind::Frob;
      else if (kind == "prime")
        cls.kind = PlaceClass::Kind::Prime;
      else if (kind == "infty")
        cls.kind = PlaceClass::Kind::Infty;
      else
        fail(ErrorCode::MalformedProfile, "unknown class kind: " + kind);
      cls.value = BigInt(c.at("value").get<int64_t>());
      cls.exps = c.at("exponents").get<std::vector<int>>();
      cls.pivot_exp = c.at("pivot_exp").get<int>();
      pr.classes.push_back(std::move(cls));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedProfile, std::string("bad profile JSON: ") + e.what());
  }
  validate_profile(pr);
  return pr;
}

inline json component_to_json(const ShaComponent& comp) {
  json j;
  j["p"] = comp.p;
  j["e"] = comp.e;
  j["invariant_factors"] = comp.invariant_factors;
  j["generators"] = comp.generators;
  j["ambient_exponents"] = comp.ambient_exponents;
  j["factor_order"] = comp.factor_order;
  return j;
}

inline json sha_to_json(const ShaGroup& sha) {
  json j;
  j["invariant_factors"] = sha.invariant_factors();
  j["order"] = sha.order().str();
  j["components"] = json::array();
  for (const auto& comp : sha.components)
    j["components"].push_back(component_to_json(comp));
  if (sha.components.size() == 1) {
    const json& c = j["components"][0];
    j["generators"] = c["generators"];
    j["ambient_exponents"] = c["ambient_exponents"];
    j["factor_order"] = c["factor_order"];
  }
  return j;
}

inline json qmodz_to_json(const QmodZ& v) {
  return json::array({v.num(), v.den()});
}

inline json obstruction_to_json(const Obstruction& ob) {
  json j = json::object();
  for (const auto& part : ob.parts) {
    json vals = json::array();
    for (const auto& v : part.generator_values) vals.push_back(qmodz_to_json(v));
    j[std::to_string(part.p)] = {{"generator_values", std::move(vals)}};
  }
  return j;
}

inline json verdict_to_json(const DecisionReport& report) {
  json j;
  switch (report.verdict) {
    case Verdict::Solvable: j["verdict"] = "solvable"; break;
    case Verdict::Obstructed: j["verdict"] = "obstructed"; break;
    case Verdict::NoLocalSolution: j["verdict"] = "no_local"; break;
  }
  j["witness"] = report.witness ? json(report.witness->str()) : json(nullptr);
  j["alpha"] =
      report.obstruction ? obstruction_to_json(*report.obstruction) : json(nullptr);
  return j;
}

inline json knot_to_json(const KnotReport& report) {
  json j;
  j["complete"] = report.complete;
  j["group_order"] = report.group_order.str();
  j["scanned"] = report.scanned;
  j["reps"] = json::array();
  for (const auto& rep : report.reps) {
    json r;
    r["c"] = rep.c.str();
    r["character"] = obstruction_to_json(rep.character);
    j["reps"].push_back(std::move(r));
  }
  return j;
}

inline json prime_case_to_json(const PrimeCaseReport& pc) {
  json j;
  j["p"] = pc.p;
  j["nonzero"] = pc.nonzero;
  j["rank"] = pc.rank;
  j["invariant_factors"] = pc.invariant_factors();
  j["factors"] = json::array();
  for (const auto& K : pc.factors) j["factors"].push_back(field_to_json(K));
  if (pc.overfield) {
    j["overfield"] = field_to_json(*pc.overfield);
    json degs = json::array();
    for (const auto& [v, d] : pc.local_degrees)
      degs.push_back(json::array({v.str(), d}));
    j["local_degrees"] = std::move(degs);
  }
  return j;
}

inline json cyclic_report_to_json(const CyclicProductReport& report) {
  json j;
  j["vanishes"] = report.vanishes;
  j["nonzero_primes"] = report.nonzero_primes;
  j["invariant_factors"] = report.group.invariant_factors();
  j["prime_cases"] = json::array();
  for (const auto& pc : report.prime_cases)
    j["prime_cases"].push_back(prime_case_to_json(pc));
  return j;
}

}  // namespace multinorm
