#pragma once

// JSON mirrors of the domain types.
//
// Structure: {"name": "c2", "signature": [{"name": "R", "arity": 2}],
//             "universe": 2, "relations": {"R": [[0, 1]]}}

#include <json.hpp>

#include <string>
#include <vector>

#include "bnf/classify.hpp"
#include "bnf/error.hpp"
#include "bnf/formula.hpp"
#include "bnf/game.hpp"
#include "bnf/structure.hpp"

namespace bnf {

using Json = nlohmann::json;

inline Json structure_to_json(const Structure& s) {
  Json sig = Json::array();
  Json rels = Json::object();
  for (std::size_t r = 0; r < s.signature().size(); ++r) {
    sig.push_back({{"name", s.signature()[r].name}, {"arity", s.signature()[r].arity}});
    Json rows = Json::array();
    for (const auto& t : s.table(r)) rows.push_back(t);
    rels[s.signature()[r].name] = rows;
  }
  Json j = {{"signature", sig}, {"universe", s.size()}, {"relations", rels}};
  if (!s.name().empty()) j["name"] = s.name();
  return j;
}

inline Structure structure_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InvalidArgument("structure must be a JSON object");
    std::vector<RelationSymbol> rels;
    for (const auto& r : j.at("signature")) rels.push_back({r.at("name").get<std::string>(), r.at("arity").get<std::size_t>()});
    Signature sig(std::move(rels));
    const auto size = j.at("universe").get<std::size_t>();
    std::vector<std::vector<ElementTuple>> tables(sig.size());
    if (j.contains("relations")) {
      for (const auto& [name, rows] : j.at("relations").items()) {
        auto r = sig.index_of(name);
        if (!r) throw InvalidArgument("unknown relation '" + name + "'");
        for (const auto& row : rows) tables[*r].push_back(row.get<ElementTuple>());
      }
    }
    return Structure(std::move(sig), size, std::move(tables), j.value("name", std::string()));
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed structure JSON: ") + e.what());
  }
}

inline Json report_to_json(const ComplexityReport& r) {
  return {{"sigma_rank", r.sigma_rank}, {"pi_rank", r.pi_rank},     {"e_rank", r.e_rank},
          {"a_rank", r.a_rank},         {"ebar_rank", r.ebar_rank}, {"abar_rank", r.abar_rank},
          {"forall_e_rank", r.forall_e_rank}};
}

inline ComplexityReport report_from_json(const Json& j) {
  ComplexityReport r;
  r.sigma_rank = j.at("sigma_rank");
  r.pi_rank = j.at("pi_rank");
  r.e_rank = j.at("e_rank");
  r.a_rank = j.at("a_rank");
  r.ebar_rank = j.at("ebar_rank");
  r.abar_rank = j.at("abar_rank");
  r.forall_e_rank = j.value("forall_e_rank", r.e_rank);
  return r;
}

inline Json error_to_json(const Error& e) { return {{"code", e.code()}, {"message", e.what()}}; }

inline Json tuple_json(const std::optional<ElementTuple>& t) { return t ? Json(*t) : Json(nullptr); }

}  // namespace bnf
