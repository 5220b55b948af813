#pragma once

// HTTP+JSON routes over a SessionStore.
//
//   POST   /sessions               {left, right, clock, mode}
//   GET    /sessions/{id}
//   POST   /sessions/{id}/moves    {tuple: [..], side?: "spoiler"|"duplicator"}
//   GET    /sessions/{id}/hint
//   DELETE /sessions/{id}
//   POST   /compute/bf             {left, right, n, direction?: "leq"|"geq"|"equiv", left_tuple?, right_tuple?}
//   POST   /compute/classify       {formula: "<text>"}
// Errors are {code, message}.

#include <httplib.h>

#include <string>

#include "bnf/classify.hpp"
#include "bnf/error.hpp"
#include "bnf/formula.hpp"
#include "bnf/game.hpp"
#include "bnf/json.hpp"
#include "bnf/session.hpp"

namespace bnf {

inline int http_status_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "not_found") return 404;
  if (c == "not_your_turn" || c == "session_finished") return 409;
  if (c == "cap_exceeded" || c == "budget_exceeded") return 422;
  return 400;
}

inline Json compute_bf(const Json& body, const SessionConfig& config) {
  Structure left = structure_from_json(body.at("left"));
  Structure right = structure_from_json(body.at("right"));
  const int n = body.at("n").get<int>();
  if (n < 0) throw InvalidArgument("n must be non-negative");
  if (n > config.clock_cap) throw Error("cap_exceeded", "n exceeds the clock cap " + std::to_string(config.clock_cap));
  if (left.size() > config.size_cap || right.size() > config.size_cap)
    throw Error("cap_exceeded", "structures are limited to " + std::to_string(config.size_cap) + " elements");
  const std::string dir = body.value("direction", std::string("leq"));
  ElementTuple lt = body.value("left_tuple", ElementTuple{});
  ElementTuple rt = body.value("right_tuple", ElementTuple{});
  Position pos(left, lt, right, rt, n);
  Json out = {{"direction", dir}};
  if (dir == "leq" || dir == "geq") {
    Verdict v = dir == "leq" ? bf_leq(pos) : bf_geq(pos);
    out["holds"] = v.holds;
    out["witness"] = tuple_json(v.witness);
    out["witness_structure"] = v.witness ? Json(dir == "leq" ? "right" : "left") : Json(nullptr);
  } else if (dir == "equiv") {
    EquivVerdict v = bf_equiv(pos);
    out["holds"] = v.holds;
    out["leq"] = v.leq;
    out["geq"] = v.geq;
    out["witness"] = tuple_json(v.witness);
    out["witness_structure"] = v.witness ? Json(!v.leq ? "right" : "left") : Json(nullptr);
  } else {
    throw InvalidArgument("direction must be leq, geq or equiv");
  }
  return out;
}

inline void install_routes(httplib::Server& server, SessionStore& store) {
  auto guarded = [](auto&& fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        res.status = http_status_for(e);
        res.set_content(error_to_json(e).dump(), "application/json");
      } catch (const Json::exception& e) {
        res.status = 400;
        res.set_content(Json{{"code", "invalid_argument"}, {"message", e.what()}}.dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(Json{{"code", "internal"}, {"message", e.what()}}.dump(), "application/json");
      }
    };
  };
  auto reply = [](httplib::Response& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  };
  auto parse_body = [](const httplib::Request& req) {
    try {
      return Json::parse(req.body);
    } catch (const Json::exception& e) {
      throw InvalidArgument(std::string("request body is not JSON: ") + e.what());
    }
  };

  server.Post("/sessions", guarded([&, reply, parse_body](const httplib::Request& req, httplib::Response& res) {
                Json body = parse_body(req);
                Structure l = structure_from_json(body.at("left"));
                Structure r = structure_from_json(body.at("right"));
                reply(res,
                      store.create(l, r, body.at("clock").get<int>(),
                                   parse_mode(body.value("mode", std::string("human-spoiler")))),
                      201);
              }));
  server.Get(R"(/sessions/([0-9a-f]+))", guarded([&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, store.get(req.matches[1]));
             }));
  server.Post(R"(/sessions/([0-9a-f]+)/moves)",
              guarded([&, reply, parse_body](const httplib::Request& req, httplib::Response& res) {
                Json body = parse_body(req);
                std::optional<Side> side;
                if (body.contains("side")) side = parse_side(body.at("side"));
                reply(res, store.move(req.matches[1], body.at("tuple").get<ElementTuple>(), side));
              }));
  server.Get(R"(/sessions/([0-9a-f]+)/hint)", guarded([&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, store.hint(req.matches[1]));
             }));
  server.Delete(R"(/sessions/([0-9a-f]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                  store.remove(req.matches[1]);
                  res.status = 204;
                }));
  server.Post("/compute/bf", guarded([&, reply, parse_body](const httplib::Request& req, httplib::Response& res) {
                reply(res, compute_bf(parse_body(req), store.config()));
              }));
  server.Post("/compute/classify", guarded([reply, parse_body](const httplib::Request& req, httplib::Response& res) {
                Json body = parse_body(req);
                Formula f = parse_formula(body.at("formula").get<std::string>());
                reply(res, report_to_json(classify(f)));
              }));
}

}  // namespace bnf
