#pragma once

// Asymmetric back-and-forth relations on finite structures.
//
// (M, a) ≤_n (N, b) holds when, for every tuple d in N, there is c in M with
// (N, bd) ≤_{n-1} (M, ac); at clock 0 the paired tuples must satisfy the same
// atomic formulas.  The solver works on the set of pairs {(a_i, b_i)} rather
// than on ordered tuples; both ordering and repeated pairs are irrelevant to
// atomic types.  A position whose pairs are not a partial isomorphism fails at
// every clock (Spoiler passes with the empty tuple until the clock runs out).
//
// Pruning used by `holds`:
//  * Spoiler's move may be taken to be every unmatched element of its
//    structure.  Dropping pairs from a holding position keeps it holding, so a
//    reply to the full move restricts to a reply to any smaller move.
//  * With at least two rounds left, the move after next is unanswerable unless
//    the reply exhausts the other structure; hence at clock >= 2 a position
//    holds iff the partial isomorphism extends to an isomorphism, and at clock
//    1 iff it extends to an embedding of Spoiler's structure.
// Colour refinement prunes candidate images in the isomorphism case.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bnf/error.hpp"
#include "bnf/structure.hpp"

namespace bnf {

/// Asserts (left, left_tuple) ≤_clock (right, right_tuple).  Spoiler moves in
/// `right`, Duplicator answers in `left`.  The structures are not owned.
struct Position {
  const Structure* left = nullptr;
  ElementTuple left_tuple;
  const Structure* right = nullptr;
  ElementTuple right_tuple;
  int clock = 0;

  Position() = default;
  Position(const Structure& l, ElementTuple lt, const Structure& r, ElementTuple rt, int c)
      : left(&l), left_tuple(std::move(lt)), right(&r), right_tuple(std::move(rt)), clock(c) {}

  /// The position with the roles of the structures exchanged.
  Position flipped() const { return Position(*right, right_tuple, *left, left_tuple, clock); }
};

struct Verdict {
  bool holds = false;
  /// Present iff !holds and clock >= 1: a Spoiler tuple in the right structure
  /// that no Duplicator reply survives.
  std::optional<ElementTuple> witness;
};

struct SolverOptions {
  /// Colour-refinement filtering of candidate images in isomorphism searches.
  bool colour_refinement = true;
  /// Maximal number of Spoiler sets examined when looking for the shortest witness;
  /// beyond it the full move (always a witness) is reported.
  std::size_t witness_budget = 1u << 16;
};

namespace detail {

using Pair = std::pair<Element, Element>;  // (element of M, element of N)
using PairSet = std::vector<Pair>;         // sorted, duplicate-free

inline void normalize(PairSet& p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
}

}  // namespace detail

/// Decides back-and-forth relations between a fixed ordered pair (M, N) and
/// extracts strategies.  Verdicts are memoized per solver; the memo table is
/// safe for concurrent use.
class GameSolver {
 public:
  GameSolver(const Structure& m, const Structure& n, SolverOptions options = {})
      : m_(m), n_(n), options_(options) {
    if (!(m.signature() == n.signature())) throw InvalidArgument("structures have different signatures");
  }

  const Structure& m() const noexcept { return m_; }
  const Structure& n() const noexcept { return n_; }

  /// (M, a) ≤_clock (N, b).
  bool leq(const ElementTuple& a, const ElementTuple& b, int clock) { return decide(a, b, clock, 0); }

  /// (N, b) ≤_clock (M, a), i.e. (M, a) ≥_clock (N, b).
  bool geq(const ElementTuple& a, const ElementTuple& b, int clock) { return decide(a, b, clock, 1); }

  /// Shortest (then lexicographically least) refuting Spoiler tuple for
  /// (M, a) ≤_clock (N, b) (dir 0) or (N, b) ≤_clock (M, a) (dir 1).  Spoiler
  /// plays in N for dir 0 and in M for dir 1.  Requires the relation to fail
  /// and clock >= 1.
  ElementTuple spoiler_witness(const ElementTuple& a, const ElementTuple& b, int clock, int dir) {
    check_args(a, b, clock);
    if (clock < 1) throw ContractViolation("spoiler_witness needs clock >= 1");
    if (decide(a, b, clock, dir)) throw ContractViolation("spoiler_witness called on a holding position");
    detail::PairSet pairs;
    if (!pairs_of(a, b, pairs)) return {};  // the empty move already refutes
    const Structure& spoiler = dir == 0 ? n_ : m_;
    std::vector<char> used(spoiler.size(), 0);
    for (const auto& p : pairs) used[dir == 0 ? p.second : p.first] = 1;
    std::vector<Element> free;
    for (Element e = 0; e < spoiler.size(); ++e)
      if (!used[e]) free.push_back(e);

    std::size_t examined = 0;
    for (std::size_t k = 0; k <= free.size(); ++k) {
      std::vector<std::size_t> idx(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        if (++examined > options_.witness_budget) return free;
        std::vector<Element> move(k);
        for (std::size_t i = 0; i < k; ++i) move[i] = free[idx[i]];
        if (!has_reply(pairs, move, clock, dir)) return move;
        // next k-combination
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == free.size() - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    return free;  // unreachable when the position fails
  }

  /// Lexicographically least Duplicator reply c (in M for dir 0, in N for
  /// dir 1) to Spoiler's tuple d keeping the swapped sub-position holding at
  /// clock-1.  Requires the position to hold and clock >= 1.
  ElementTuple duplicator_reply(const ElementTuple& a, const ElementTuple& b, int clock, int dir,
                                const ElementTuple& spoiler_tuple) {
    check_args(a, b, clock);
    if (clock < 1) throw ContractViolation("duplicator_reply needs clock >= 1");
    const Structure& spoiler = dir == 0 ? n_ : m_;
    check_tuple(spoiler, spoiler_tuple);
    if (!decide(a, b, clock, dir)) throw ContractViolation("duplicator_reply called on a failing position");
    auto reply = least_reply(a, b, clock, dir, spoiler_tuple);
    if (!reply) throw ContractViolation("no Duplicator reply survives (inconsistent solver state)");
    return *reply;
  }

  /// Lexicographically least reply, or nullopt when every reply loses.
  /// Unlike duplicator_reply this does not require the position to hold.
  std::optional<ElementTuple> least_reply(const ElementTuple& a, const ElementTuple& b, int clock, int dir,
                                          const ElementTuple& spoiler_tuple) {
    check_args(a, b, clock);
    detail::PairSet pairs;
    if (!pairs_of(a, b, pairs) || clock < 1) return std::nullopt;
    const Structure& dup = dir == 0 ? m_ : n_;
    ElementTuple reply(spoiler_tuple.size());
    std::function<bool(std::size_t, detail::PairSet&)> go = [&](std::size_t k, detail::PairSet& cur) -> bool {
      if (k == spoiler_tuple.size()) return holds(cur, clock - 1, 1 - dir);
      const Element d = spoiler_tuple[k];
      for (Element c = 0; c < dup.size(); ++c) {
        const Element mm = dir == 0 ? c : d;
        const Element nn = dir == 0 ? d : c;
        detail::PairSet next = cur;
        if (!add_pair(next, mm, nn)) continue;
        reply[k] = c;
        if (go(k + 1, next)) return true;
      }
      return false;
    };
    if (go(0, pairs)) return reply;
    return std::nullopt;
  }

  /// Number of distinct (pair set, clock, direction) entries memoized so far.
  std::size_t memo_size() const {
    std::shared_lock lock(memo_mutex_);
    return memo_.size();
  }

  /// Core decision on a pair set; exposed for the strategy helpers above.
  bool holds(const detail::PairSet& pairs, int clock, int dir) {
    if (clock <= 0) return true;
    const std::vector<std::uint64_t> key = memo_key(pairs, clock, dir);
    {
      std::shared_lock lock(memo_mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    bool result = compute(pairs, clock, dir);
    {
      std::unique_lock lock(memo_mutex_);
      memo_.emplace(key, result);
    }
    return result;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (auto x : v) h = (h ^ x) * 1099511628211ull;
      return h;
    }
  };

  static std::vector<std::uint64_t> memo_key(const detail::PairSet& pairs, int clock, int dir) {
    std::vector<std::uint64_t> key;
    key.reserve(pairs.size() + 1);
    key.push_back((static_cast<std::uint64_t>(clock) << 1) | static_cast<std::uint64_t>(dir));
    for (const auto& [x, y] : pairs) key.push_back((static_cast<std::uint64_t>(x) << 32) | y);
    return key;
  }

  void check_args(const ElementTuple& a, const ElementTuple& b, int clock) const {
    if (a.size() != b.size()) throw InvalidArgument("tuples have different lengths");
    if (clock < 0) throw InvalidArgument("clock must be non-negative");
    check_tuple(m_, a);
    check_tuple(n_, b);
  }

  bool decide(const ElementTuple& a, const ElementTuple& b, int clock, int dir) {
    check_args(a, b, clock);
    detail::PairSet pairs;
    if (!pairs_of(a, b, pairs)) return false;
    return holds(pairs, clock, dir);
  }

  /// Builds the pair set; false when the tuples differ in atomic type.
  bool pairs_of(const ElementTuple& a, const ElementTuple& b, detail::PairSet& out) const {
    if (!same_atomic_type(m_, a, n_, b)) return false;
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i) out.emplace_back(a[i], b[i]);
    detail::normalize(out);
    return true;
  }

  /// Adds (x, y) keeping a partial isomorphism; false on conflict.
  bool add_pair(detail::PairSet& pairs, Element x, Element y) const {
    for (const auto& [px, py] : pairs) {
      if (px == x && py == y) return true;
      if (px == x || py == y) return false;
    }
    if (!consistent(pairs, x, y)) return false;
    pairs.insert(std::upper_bound(pairs.begin(), pairs.end(), detail::Pair{x, y}), {x, y});
    return true;
  }

  /// Does pairs ∪ {(x, y)} preserve every relation?  (x, y) must be new on both sides.
  bool consistent(const detail::PairSet& pairs, Element x, Element y) const {
    const std::size_t p = pairs.size();
    std::vector<Element> lm(p + 1), ln(p + 1);
    lm[0] = x;
    ln[0] = y;
    for (std::size_t i = 0; i < p; ++i) {
      lm[i + 1] = pairs[i].first;
      ln[i + 1] = pairs[i].second;
    }
    return tuples_agree(lm, ln, 0);
  }

  /// Checks every relation tuple over the index list that mentions index `focus`.
  /// Tuples are enumerated by the first position holding `focus`: earlier
  /// positions range over the other indices, later ones over all indices.
  bool tuples_agree(const std::vector<Element>& lm, const std::vector<Element>& ln, std::size_t focus) const {
    const std::size_t L = lm.size();
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < L; ++i)
      if (i != focus) others.push_back(i);
    std::vector<Element> tm, tn;
    std::vector<std::size_t> ctr, lim;
    for (std::size_t r = 0; r < m_.signature().size(); ++r) {
      const std::size_t k = m_.signature()[r].arity;
      tm.assign(k, 0);
      tn.assign(k, 0);
      for (std::size_t f = 0; f < k; ++f) {
        if (f > 0 && others.empty()) break;
        ctr.assign(k, 0);
        lim.assign(k, 0);
        for (std::size_t q = 0; q < k; ++q) lim[q] = q < f ? others.size() : (q == f ? 1 : L);
        while (true) {
          for (std::size_t q = 0; q < k; ++q) {
            const std::size_t i = q < f ? others[ctr[q]] : (q == f ? focus : ctr[q]);
            tm[q] = lm[i];
            tn[q] = ln[i];
          }
          if (m_.holds(r, tm) != n_.holds(r, tn)) return false;
          bool more = false;
          for (std::size_t q = k; q-- > 0;) {
            if (++ctr[q] < lim[q]) {
              more = true;
              break;
            }
            ctr[q] = 0;
          }
          if (!more) break;
        }
      }
    }
    return true;
  }

  bool compute(const detail::PairSet& pairs, int clock, int dir) {
    const Structure& spoiler = dir == 0 ? n_ : m_;
    const Structure& dup = dir == 0 ? m_ : n_;
    std::vector<char> used_s(spoiler.size(), 0), used_d(dup.size(), 0);
    for (const auto& [x, y] : pairs) {
      used_s[dir == 0 ? y : x] = 1;
      used_d[dir == 0 ? x : y] = 1;
    }
    std::vector<Element> vars, pool;
    for (Element e = 0; e < spoiler.size(); ++e)
      if (!used_s[e]) vars.push_back(e);
    for (Element e = 0; e < dup.size(); ++e)
      if (!used_d[e]) pool.push_back(e);
    if (vars.size() > pool.size()) return false;
    const bool bijective = clock >= 2;
    if (bijective && vars.size() != pool.size()) return false;
    return extend(pairs, vars, pool, dir, bijective,
                  [&](const detail::PairSet& full) { return holds(full, clock - 1, 1 - dir); });
  }

  /// Colour refinement of M and N with the matched pairs individualised.
  /// Returns colours indexed [M elements..., N elements...], or nullopt when
  /// the colour histograms differ (no isomorphism extends the pairs).
  std::optional<std::vector<int>> refine(const detail::PairSet& pairs) const {
    const std::size_t sm = m_.size(), sn = n_.size();
    std::vector<int> colour(sm + sn);
    std::map<std::vector<long long>, int> ids;
    auto id_of = [&](std::vector<long long>&& sig) {
      auto [it, inserted] = ids.emplace(std::move(sig), static_cast<int>(ids.size()));
      return it->second;
    };
    std::vector<long long> pair_index_m(sm, -1), pair_index_n(sn, -1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      pair_index_m[pairs[i].first] = static_cast<long long>(i);
      pair_index_n[pairs[i].second] = static_cast<long long>(i);
    }
    auto init = [&](const Structure& s, Element v, long long pidx) {
      std::vector<long long> sig{pidx};
      for (std::size_t r = 0; r < s.signature().size(); ++r) {
        std::vector<Element> diag(s.signature()[r].arity, v);
        sig.push_back(s.holds(r, diag) ? 1 : 0);
      }
      return sig;
    };
    for (Element v = 0; v < sm; ++v) colour[v] = id_of(init(m_, v, pair_index_m[v]));
    for (Element v = 0; v < sn; ++v) colour[sm + v] = id_of(init(n_, v, pair_index_n[v]));

    auto classes = [&](const std::vector<int>& c) {
      std::vector<int> s(c);
      std::sort(s.begin(), s.end());
      return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
    };
    std::size_t count = classes(colour);
    while (true) {
      std::vector<std::vector<std::vector<long long>>> incid(sm + sn);
      auto collect = [&](const Structure& s, std::size_t offset) {
        for (std::size_t r = 0; r < s.signature().size(); ++r)
          for (const auto& t : s.table(r))
            for (std::size_t p = 0; p < t.size(); ++p) {
              std::vector<long long> entry{static_cast<long long>(r), static_cast<long long>(p)};
              for (Element e : t) entry.push_back(colour[offset + e]);
              incid[offset + t[p]].push_back(std::move(entry));
            }
      };
      collect(m_, 0);
      collect(n_, sm);
      std::map<std::vector<long long>, int> next_ids;
      std::vector<int> next(sm + sn);
      for (std::size_t v = 0; v < sm + sn; ++v) {
        auto& inc = incid[v];
        std::sort(inc.begin(), inc.end());
        std::vector<long long> sig{colour[v]};
        for (const auto& e : inc) {
          sig.push_back(-1);
          sig.insert(sig.end(), e.begin(), e.end());
        }
        auto [it, inserted] = next_ids.emplace(std::move(sig), static_cast<int>(next_ids.size()));
        next[v] = it->second;
      }
      std::size_t next_count = classes(next);
      colour = std::move(next);
      if (next_count == count) break;
      count = next_count;
    }
    std::map<int, long long> hist;
    for (std::size_t v = 0; v < sm; ++v) ++hist[colour[v]];
    for (std::size_t v = 0; v < sn; ++v) --hist[colour[sm + v]];
    for (const auto& [c, h] : hist)
      if (h != 0) return std::nullopt;
    return colour;
  }

  /// Searches for an injection vars -> pool (spoiler side into Duplicator
  /// side) extending `pairs` to a partial isomorphism that satisfies `accept`.
  bool extend(const detail::PairSet& pairs, const std::vector<Element>& vars, const std::vector<Element>& pool,
              int dir, bool bijective, const std::function<bool(const detail::PairSet&)>& accept) const {
    auto make_pair_for = [&](Element var, Element cand) {
      return dir == 0 ? detail::Pair{cand, var} : detail::Pair{var, cand};
    };
    std::optional<std::vector<int>> colours;
    if (bijective && options_.colour_refinement && !vars.empty()) {
      colours = refine(pairs);
      if (!colours) return false;
    }
    auto colour_of_var = [&](Element v) { return dir == 0 ? (*colours)[m_.size() + v] : (*colours)[v]; };
    auto colour_of_cand = [&](Element c) { return dir == 0 ? (*colours)[c] : (*colours)[m_.size() + c]; };

    const std::size_t nv = vars.size();
    std::vector<std::vector<Element>> domain(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      for (Element c : pool) {
        if (colours && colour_of_var(vars[i]) != colour_of_cand(c)) continue;
        auto [x, y] = make_pair_for(vars[i], c);
        if (consistent(pairs, x, y)) domain[i].push_back(c);
      }
      if (domain[i].empty()) return false;
    }
    {
      std::map<std::vector<Element>, std::size_t> groups;
      for (const auto& d : domain)
        if (++groups[d] > d.size()) return false;
    }

    std::vector<char> assigned(nv, 0);
    detail::PairSet cur = pairs;
    std::function<bool(std::vector<std::vector<Element>>&, std::size_t)> go =
        [&](std::vector<std::vector<Element>>& dom, std::size_t remaining) -> bool {
      if (remaining == 0) return accept(cur);
      std::size_t best = nv;
      for (std::size_t i = 0; i < nv; ++i)
        if (!assigned[i] && (best == nv || dom[i].size() < dom[best].size())) best = i;
      if (dom[best].empty()) return false;
      const Element var = vars[best];
      for (Element c : dom[best]) {
        auto [x, y] = make_pair_for(var, c);
        if (!consistent(cur, x, y)) continue;
        detail::PairSet saved = cur;
        cur.insert(std::upper_bound(cur.begin(), cur.end(), detail::Pair{x, y}), {x, y});
        assigned[best] = 1;
        // forward check on the two-element pattern {var, other}
        std::vector<std::vector<Element>> next = dom;
        bool dead = false;
        for (std::size_t j = 0; j < nv && !dead; ++j) {
          if (assigned[j]) continue;
          auto& dj = next[j];
          std::vector<Element> kept;
          kept.reserve(dj.size());
          for (Element e : dj) {
            if (e == c) continue;
            auto [x2, y2] = make_pair_for(vars[j], e);
            if (pair_compatible(x, y, x2, y2)) kept.push_back(e);
          }
          dj = std::move(kept);
          if (dj.empty()) dead = true;
        }
        if (!dead && go(next, remaining - 1)) return true;
        assigned[best] = 0;
        cur = std::move(saved);
      }
      return false;
    };
    return go(domain, nv);
  }

  /// Relations restricted to the two elements agree for the pairs (x, y) and (x2, y2).
  bool pair_compatible(Element x, Element y, Element x2, Element y2) const {
    std::vector<Element> lm{x2, x}, ln{y2, y};
    return tuples_agree(lm, ln, 0);
  }

  /// Is there a reply to Spoiler's `move` (unmatched elements) surviving at clock-1?
  bool has_reply(const detail::PairSet& pairs, const std::vector<Element>& move, int clock, int dir) {
    const Structure& dup = dir == 0 ? m_ : n_;
    std::vector<char> used_d(dup.size(), 0);
    for (const auto& [x, y] : pairs) used_d[dir == 0 ? x : y] = 1;
    std::vector<Element> pool;
    for (Element e = 0; e < dup.size(); ++e)
      if (!used_d[e]) pool.push_back(e);
    if (move.size() > pool.size()) return false;
    return extend(pairs, move, pool, dir, false,
                  [&](const detail::PairSet& full) { return holds(full, clock - 1, 1 - dir); });
  }

  const Structure& m_;
  const Structure& n_;
  SolverOptions options_;
  mutable std::shared_mutex memo_mutex_;
  std::unordered_map<std::vector<std::uint64_t>, bool, KeyHash> memo_;
};

// ---------------------------------------------------------------------------
// Position-level API

inline void check_position(const Position& pos) {
  if (!pos.left || !pos.right) throw InvalidArgument("position without structures");
  if (pos.left_tuple.size() != pos.right_tuple.size()) throw InvalidArgument("tuples have different lengths");
  if (pos.clock < 0) throw InvalidArgument("clock must be non-negative");
  check_tuple(*pos.left, pos.left_tuple);
  check_tuple(*pos.right, pos.right_tuple);
}

inline Verdict bf_leq(const Position& pos, SolverOptions options = {}) {
  check_position(pos);
  GameSolver solver(*pos.left, *pos.right, options);
  Verdict v;
  v.holds = solver.leq(pos.left_tuple, pos.right_tuple, pos.clock);
  if (!v.holds && pos.clock >= 1) v.witness = solver.spoiler_witness(pos.left_tuple, pos.right_tuple, pos.clock, 0);
  return v;
}

/// (left, left_tuple) ≥_clock (right, right_tuple); the witness lives in `left`.
inline Verdict bf_geq(const Position& pos, SolverOptions options = {}) { return bf_leq(pos.flipped(), options); }

/// Both directions; on failure the witness comes from the failing direction
/// (≤ checked first; its witness lies in `right`, the ≥ witness in `left`).
struct EquivVerdict {
  bool holds = false;
  bool leq = false;
  bool geq = false;
  std::optional<ElementTuple> witness;
};

inline EquivVerdict bf_equiv(const Position& pos, SolverOptions options = {}) {
  EquivVerdict out;
  Verdict l = bf_leq(pos, options);
  Verdict g = bf_geq(pos, options);
  out.leq = l.holds;
  out.geq = g.holds;
  out.holds = l.holds && g.holds;
  if (!l.holds)
    out.witness = l.witness;
  else if (!g.holds)
    out.witness = g.witness;
  return out;
}

/// Largest n <= cap with left ≡_n right (empty tuples).
inline int bf_rank(const Structure& left, const Structure& right, int cap, SolverOptions options = {}) {
  GameSolver solver(left, right, options);
  for (int n = 0; n <= cap; ++n)
    if (!solver.leq({}, {}, n) || !solver.geq({}, {}, n)) return n - 1 < 0 ? 0 : n - 1;
  return cap;
}

inline ElementTuple duplicator_reply(const Position& pos, const ElementTuple& spoiler_tuple,
                                     SolverOptions options = {}) {
  check_position(pos);
  GameSolver solver(*pos.left, *pos.right, options);
  return solver.duplicator_reply(pos.left_tuple, pos.right_tuple, pos.clock, 0, spoiler_tuple);
}

inline ElementTuple spoiler_witness(const Position& pos, SolverOptions options = {}) {
  check_position(pos);
  GameSolver solver(*pos.left, *pos.right, options);
  return solver.spoiler_witness(pos.left_tuple, pos.right_tuple, pos.clock, 0);
}

}  // namespace bnf
