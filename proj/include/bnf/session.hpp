#pragma once

// Interactive games against the solver.
//
// The position asserts (current left, tuple) ≤_clock (current right, tuple).
// Spoiler plays into the current right structure, Duplicator answers in the
// current left one; after each round the structures swap roles and the clock
// drops by one.  At clock 0 the paired tuples are compared atomically.
// When the engine has no winning move it plays the lexicographically least
// legal one (the empty tuple for Spoiler, all zeros for Duplicator) and labels
// it "non-winning".

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bnf/error.hpp"
#include "bnf/game.hpp"
#include "bnf/json.hpp"
#include "bnf/structure.hpp"
#include "bnf/synth.hpp"

namespace bnf {

enum class SessionMode { HumanSpoiler, HumanDuplicator };
enum class SessionStatus { InProgress, DuplicatorSurvived, SpoilerWon };
enum class Side { Spoiler, Duplicator };

inline std::string to_string(SessionMode m) { return m == SessionMode::HumanSpoiler ? "human-spoiler" : "human-duplicator"; }
inline std::string to_string(Side s) { return s == Side::Spoiler ? "spoiler" : "duplicator"; }
inline std::string to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::InProgress: return "in-progress";
    case SessionStatus::DuplicatorSurvived: return "duplicator-survived";
    case SessionStatus::SpoilerWon: return "spoiler-won";
  }
  return "";
}

inline SessionMode parse_mode(const std::string& s) {
  if (s == "human-spoiler") return SessionMode::HumanSpoiler;
  if (s == "human-duplicator") return SessionMode::HumanDuplicator;
  throw InvalidArgument("mode must be human-spoiler or human-duplicator");
}

inline Side parse_side(const std::string& s) {
  if (s == "spoiler") return Side::Spoiler;
  if (s == "duplicator") return Side::Duplicator;
  throw InvalidArgument("side must be spoiler or duplicator");
}

struct SessionConfig {
  int clock_cap = 4;
  std::size_t size_cap = 12;
};

struct HistoryEntry {
  Side side = Side::Spoiler;
  bool in_left = false;  // played in the session's left structure
  ElementTuple tuple;
  bool by_engine = false;
  std::string label;  // "human", "winning" or "non-winning"
};

struct Hint {
  Side side = Side::Spoiler;
  ElementTuple move;
  bool winning = false;
  std::string explanation;
  std::optional<std::string> formula;
};

class GameSession {
 public:
  GameSession(std::string id, Structure left, Structure right, int clock, SessionMode mode,
              SessionConfig config = {})
      : id_(std::move(id)),
        left_(std::make_unique<Structure>(std::move(left))),
        right_(std::make_unique<Structure>(std::move(right))),
        mode_(mode),
        clock_(clock),
        initial_clock_(clock) {
    if (clock < 0) throw InvalidArgument("clock must be non-negative");
    if (clock > config.clock_cap)
      throw Error("cap_exceeded", "clock " + std::to_string(clock) + " exceeds the cap " + std::to_string(config.clock_cap));
    if (left_->size() > config.size_cap || right_->size() > config.size_cap)
      throw Error("cap_exceeded", "structures are limited to " + std::to_string(config.size_cap) + " elements");
    solver_ = std::make_unique<GameSolver>(*left_, *right_);
    initial_verdict_ = solver_->leq({}, {}, clock);
    if (clock_ == 0)
      resolve();
    else
      engine_turn();
  }

  GameSession(const GameSession&) = delete;
  GameSession& operator=(const GameSession&) = delete;

  const std::string& id() const noexcept { return id_; }
  SessionMode mode() const noexcept { return mode_; }
  SessionStatus status() const noexcept { return status_; }
  int clock() const noexcept { return clock_; }
  int initial_clock() const noexcept { return initial_clock_; }
  /// Solver verdict for the whole game: does Duplicator win under optimal play?
  bool initial_verdict() const noexcept { return initial_verdict_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  const ElementTuple& left_tuple() const noexcept { return a_; }
  const ElementTuple& right_tuple() const noexcept { return b_; }
  const Structure& left() const noexcept { return *left_; }
  const Structure& right() const noexcept { return *right_; }
  /// True when the session's left structure currently plays the left role.
  bool left_is_current_left() const noexcept { return dir_ == 0; }

  std::optional<Side> turn() const {
    if (status_ != SessionStatus::InProgress) return std::nullopt;
    return pending_ ? Side::Duplicator : Side::Spoiler;
  }

  /// Records the human move and lets the engine answer.
  void submit(const ElementTuple& tuple, std::optional<Side> claimed = std::nullopt) {
    if (status_ != SessionStatus::InProgress) throw Error("session_finished", "the session is finished");
    const Side human = mode_ == SessionMode::HumanSpoiler ? Side::Spoiler : Side::Duplicator;
    if (*turn() != human || (claimed && *claimed != human)) throw Error("not_your_turn", "it is not your turn");
    if (human == Side::Spoiler) {
      play_spoiler(tuple, false, "human");
      if (status_ == SessionStatus::InProgress) engine_turn();
    } else {
      play_duplicator(tuple, false, "human");
      if (status_ == SessionStatus::InProgress) engine_turn();
    }
  }

  Hint hint() {
    if (status_ != SessionStatus::InProgress) throw Error("session_finished", "the session is finished");
    Hint h;
    h.side = *turn();
    if (h.side == Side::Spoiler) {
      if (!position_holds()) {
        h.move = solver_->spoiler_witness(a_, b_, clock_, dir_);
        h.winning = true;
        Formula f = detail::Distinguisher(*solver_).build(a_, b_, clock_, dir_);
        h.formula = bnf::to_string(f);
        h.explanation = "Spoiler wins; the formula holds of the left tuple and fails of the right tuple";
      } else {
        h.move = {};
        h.winning = false;
        h.explanation = "no winning move exists; Duplicator survives under optimal play";
      }
    } else {
      auto reply = solver_->least_reply(a_, b_, clock_, dir_, *pending_);
      if (reply) {
        h.move = *reply;
        h.winning = true;
        h.explanation = "this reply keeps the position winning for Duplicator";
      } else {
        h.move = ElementTuple(pending_->size(), 0);
        h.winning = false;
        h.explanation = "no winning reply exists";
      }
    }
    return h;
  }

  Json to_json() const {
    Json hist = Json::array();
    for (const auto& e : history_)
      hist.push_back({{"side", bnf::to_string(e.side)},
                      {"structure", e.in_left ? "left" : "right"},
                      {"tuple", e.tuple},
                      {"by", e.by_engine ? "engine" : "human"},
                      {"label", e.label}});
    auto t = turn();
    return {{"id", id_},
            {"mode", bnf::to_string(mode_)},
            {"status", bnf::to_string(status_)},
            {"clock", clock_},
            {"initial_clock", initial_clock_},
            {"turn", t ? Json(bnf::to_string(*t)) : Json(nullptr)},
            {"current_left", dir_ == 0 ? "left" : "right"},
            {"current_right", dir_ == 0 ? "right" : "left"},
            {"left_tuple", a_},
            {"right_tuple", b_},
            {"pending", pending_ ? Json(*pending_) : Json(nullptr)},
            {"history", hist},
            {"verdict",
             {{"holds", initial_verdict_}, {"winner", initial_verdict_ ? "duplicator" : "spoiler"}}},
            {"left", structure_to_json(*left_)},
            {"right", structure_to_json(*right_)}};
  }

 private:
  const Structure& spoiler_structure() const { return dir_ == 0 ? *right_ : *left_; }
  const Structure& duplicator_structure() const { return dir_ == 0 ? *left_ : *right_; }

  bool position_holds() {
    if (!same_atomic_type(*left_, a_, *right_, b_)) return false;
    return dir_ == 0 ? solver_->leq(a_, b_, clock_) : solver_->geq(a_, b_, clock_);
  }

  void engine_turn() {
    const Side engine = mode_ == SessionMode::HumanSpoiler ? Side::Duplicator : Side::Spoiler;
    if (status_ != SessionStatus::InProgress || *turn() != engine) return;
    if (engine == Side::Spoiler) {
      if (!position_holds())
        play_spoiler(solver_->spoiler_witness(a_, b_, clock_, dir_), true, "winning");
      else
        play_spoiler({}, true, "non-winning");
    } else {
      auto reply = solver_->least_reply(a_, b_, clock_, dir_, *pending_);
      if (reply)
        play_duplicator(*reply, true, "winning");
      else
        play_duplicator(ElementTuple(pending_->size(), 0), true, "non-winning");
    }
  }

  void play_spoiler(const ElementTuple& d, bool engine, const std::string& label) {
    try {
      check_tuple(spoiler_structure(), d);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("invalid Spoiler move: ") + e.what());
    }
    history_.push_back({Side::Spoiler, dir_ == 1, d, engine, label});
    pending_ = d;
    if (!d.empty() && duplicator_structure().size() == 0) status_ = SessionStatus::SpoilerWon;
  }

  void play_duplicator(const ElementTuple& c, bool engine, const std::string& label) {
    if (c.size() != pending_->size())
      throw InvalidArgument("reply must have length " + std::to_string(pending_->size()));
    try {
      check_tuple(duplicator_structure(), c);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("invalid Duplicator move: ") + e.what());
    }
    history_.push_back({Side::Duplicator, dir_ == 0, c, engine, label});
    const ElementTuple& d = *pending_;
    if (dir_ == 0) {
      a_.insert(a_.end(), c.begin(), c.end());
      b_.insert(b_.end(), d.begin(), d.end());
    } else {
      a_.insert(a_.end(), d.begin(), d.end());
      b_.insert(b_.end(), c.begin(), c.end());
    }
    pending_.reset();
    dir_ = 1 - dir_;
    --clock_;
    if (clock_ == 0) resolve();
  }

  void resolve() {
    status_ = same_atomic_type(*left_, a_, *right_, b_) ? SessionStatus::DuplicatorSurvived : SessionStatus::SpoilerWon;
  }

  std::string id_;
  std::unique_ptr<Structure> left_, right_;
  std::unique_ptr<GameSolver> solver_;
  SessionMode mode_;
  SessionStatus status_ = SessionStatus::InProgress;
  int clock_;
  int initial_clock_;
  bool initial_verdict_ = false;
  int dir_ = 0;
  ElementTuple a_, b_;
  std::optional<ElementTuple> pending_;
  std::vector<HistoryEntry> history_;
};

inline Json hint_to_json(const Hint& h) {
  Json j = {{"side", to_string(h.side)}, {"move", h.move}, {"winning", h.winning}, {"explanation", h.explanation}};
  j["formula"] = h.formula ? Json(*h.formula) : Json(nullptr);
  return j;
}

/// In-memory sessions with an optional append-only NDJSON log replayed on start.
class SessionStore {
 public:
  explicit SessionStore(SessionConfig config = {}, std::optional<std::string> log_path = std::nullopt)
      : config_(config), log_path_(std::move(log_path)), rng_(std::random_device{}()) {
    if (log_path_) replay();
  }

  const SessionConfig& config() const noexcept { return config_; }

  Json create(const Structure& left, const Structure& right, int clock, SessionMode mode) {
    std::string id = fresh_id();
    auto entry = std::make_shared<Entry>(id, left, right, clock, mode, config_);
    Json out;
    {
      std::lock_guard lock(mutex_);
      sessions_[id] = entry;
    }
    log({{"event", "create"},
         {"id", id},
         {"left", structure_to_json(left)},
         {"right", structure_to_json(right)},
         {"clock", clock},
         {"mode", to_string(mode)}});
    std::lock_guard lock(entry->mutex);
    return entry->session.to_json();
  }

  Json get(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return e->session.to_json();
  }

  Json move(const std::string& id, const ElementTuple& tuple, std::optional<Side> side = std::nullopt) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    e->session.submit(tuple, side);
    log({{"event", "move"}, {"id", id}, {"tuple", tuple}});
    return e->session.to_json();
  }

  Json hint(const std::string& id) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return hint_to_json(e->session.hint());
  }

  void remove(const std::string& id) {
    {
      std::lock_guard lock(mutex_);
      if (!sessions_.erase(id)) throw Error("not_found", "no session '" + id + "'");
    }
    log({{"event", "delete"}, {"id", id}});
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

 private:
  struct Entry {
    Entry(const std::string& id, const Structure& l, const Structure& r, int clock, SessionMode mode,
          SessionConfig cfg)
        : session(id, l, r, clock, mode, cfg) {}
    std::mutex mutex;
    GameSession session;
  };

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error("not_found", "no session '" + id + "'");
    return it->second;
  }

  std::string fresh_id() {
    std::lock_guard lock(mutex_);
    while (true) {
      std::ostringstream os;
      os << std::hex << rng_();
      if (!sessions_.count(os.str())) return os.str();
    }
  }

  void log(const Json& event) {
    if (!log_path_) return;
    std::lock_guard lock(log_mutex_);
    std::ofstream out(*log_path_, std::ios::app);
    out << event.dump() << "\n";
  }

  void replay() {
    std::ifstream in(*log_path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        Json ev = Json::parse(line);
        const std::string kind = ev.at("event");
        const std::string id = ev.at("id");
        if (kind == "create") {
          sessions_[id] = std::make_shared<Entry>(id, structure_from_json(ev.at("left")),
                                                  structure_from_json(ev.at("right")), ev.at("clock").get<int>(),
                                                  parse_mode(ev.at("mode")), config_);
        } else if (kind == "move") {
          auto it = sessions_.find(id);
          if (it != sessions_.end()) it->second->session.submit(ev.at("tuple").get<ElementTuple>());
        } else if (kind == "delete") {
          sessions_.erase(id);
        }
      } catch (const std::exception&) {
        // skip damaged lines
      }
    }
  }

  SessionConfig config_;
  std::optional<std::string> log_path_;
  mutable std::mutex mutex_;
  std::mutex log_mutex_;
  std::mt19937_64 rng_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace bnf
