#pragma once

// Checks of combinatorial criteria against the game solver: family
// domination for flower graphs, the disjoint-union criteria, and interval
// factoring for linear orders.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bnf/builders.hpp"
#include "bnf/error.hpp"
#include "bnf/game.hpp"
#include "bnf/structure.hpp"

namespace bnf {

/// ∀T ∈ t ∃S ∈ s with S ⊆ T.
inline bool dominates(const Family& s, const Family& t) {
  for (const auto& T : t.sets()) {
    bool found = false;
    for (const auto& S : s.sets())
      if (is_subset(S, T)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

inline bool is_closed(const Family& f) { return close_family(f) == f; }

/// Induced substructure on `elements`, renumbered in the listed order.
inline Structure induced_substructure(const Structure& s, const std::vector<Element>& elements,
                                      std::string name = "") {
  std::vector<long> pos(s.size(), -1);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] >= s.size()) throw InvalidArgument("element out of range");
    if (pos[elements[i]] >= 0) throw InvalidArgument("repeated element");
    pos[elements[i]] = static_cast<long>(i);
  }
  std::vector<std::vector<ElementTuple>> tables(s.signature().size());
  for (std::size_t r = 0; r < s.signature().size(); ++r)
    for (const auto& t : s.table(r)) {
      ElementTuple u;
      bool inside = true;
      for (Element e : t) {
        if (pos[e] < 0) {
          inside = false;
          break;
        }
        u.push_back(static_cast<Element>(pos[e]));
      }
      if (inside) tables[r].push_back(std::move(u));
    }
  return Structure(s.signature(), elements.size(), std::move(tables), std::move(name));
}

// ---------------------------------------------------------------------------
// Flower graphs

struct SubsetLeq2Report {
  bool dominates = false;
  std::vector<std::size_t> copies;
  std::vector<std::size_t> sizes_s, sizes_t;  // graph sizes per truncation
  std::vector<bool> verdicts;                  // G_s(k) ≤_2 G_t(k)
  /// Largest scheduled k whose verdict equals the next scheduled one.
  std::optional<std::size_t> stabilized_at;
  std::optional<bool> stabilized_verdict;
  /// Solver verdict at stabilization equals the domination verdict.
  bool agrees = false;
};

inline SubsetLeq2Report verify_claim_subsetleq2(const Family& s, const Family& t,
                                                const std::vector<std::size_t>& copies_schedule,
                                                std::size_t size_budget = 400) {
  if (!is_closed(s) || !is_closed(t)) throw InvalidArgument("families must be closed under additions");
  if (copies_schedule.empty()) throw InvalidArgument("empty truncation schedule");
  SubsetLeq2Report rep;
  rep.dominates = dominates(s, t);
  rep.copies = copies_schedule;
  std::sort(rep.copies.begin(), rep.copies.end());
  for (std::size_t k : rep.copies) {
    Structure gs = build_flower_graph(s, k);
    Structure gt = build_flower_graph(t, k);
    if (gs.size() > size_budget || gt.size() > size_budget)
      throw BudgetExceeded("flower graph exceeds the size budget");
    rep.sizes_s.push_back(gs.size());
    rep.sizes_t.push_back(gt.size());
    GameSolver solver(gs, gt);
    rep.verdicts.push_back(solver.leq({}, {}, 2));
  }
  for (std::size_t i = 0; i + 1 < rep.verdicts.size(); ++i)
    if (rep.verdicts[i] == rep.verdicts[i + 1]) {
      rep.stabilized_at = rep.copies[i];
      rep.stabilized_verdict = rep.verdicts[i];
    }
  rep.agrees = rep.stabilized_verdict && *rep.stabilized_verdict == rep.dominates;
  return rep;
}

struct Geq3Report {
  bool hypothesis_ok = false;
  std::string hypothesis_error;
  std::size_t copies = 0;
  std::optional<bool> verdict;  // G_s ≥_3 G_t, only when the hypothesis holds
};

inline Geq3Report verify_claim_geq3(const Family& s, const Family& t, std::size_t copies,
                                    std::size_t size_budget = 400) {
  Geq3Report rep;
  rep.copies = copies;
  for (const auto& S : s.sets())
    if (!t.sets().count(S)) {
      rep.hypothesis_error = "s is not a subfamily of t";
      return rep;
    }
  if (!dominates(s, t)) {
    rep.hypothesis_error = "s does not dominate t";
    return rep;
  }
  rep.hypothesis_ok = true;
  Structure gs = build_flower_graph(s, copies);
  Structure gt = build_flower_graph(t, copies);
  if (gs.size() > size_budget || gt.size() > size_budget) throw BudgetExceeded("flower graph exceeds the size budget");
  GameSolver solver(gs, gt);
  rep.verdict = solver.geq({}, {}, 3);
  return rep;
}

// ---------------------------------------------------------------------------
// Disjoint unions

struct UnionCriteriaReport {
  std::size_t n = 0;
  bool cond_a = false, cond_b = false, cond_c = false, cond_d = false;
  std::optional<std::pair<std::size_t, std::size_t>> counterexample_a;  // positions k, l
  std::optional<std::size_t> counterexample_b;                          // E-class group of the tuples
  std::optional<std::size_t> counterexample_c;                          // part of A
  std::optional<std::size_t> counterexample_d;                          // part of B
  bool conclusion_checked = false;
  std::optional<bool> conclusion;  // (A, a) ≥_n (B, b)
  std::vector<std::size_t> multiplicities_a, multiplicities_b;
};

namespace detail {

struct UnionIndex {
  Structure whole;
  std::vector<std::size_t> copy_of;    // element -> copy index
  std::vector<std::size_t> part_of;    // copy index -> part index
  std::vector<Element> base_of;        // copy index -> first element
};

inline UnionIndex index_union(const ComponentSpec& spec) {
  UnionIndex u{disjoint_union(spec), union_component_of(spec), {}, {}};
  Element base = 0;
  for (std::size_t p = 0; p < spec.parts.size(); ++p)
    for (std::size_t c = 0; c < spec.parts[p].second; ++c) {
      u.part_of.push_back(p);
      u.base_of.push_back(base);
      base += static_cast<Element>(spec.parts[p].first.size());
    }
  return u;
}

}  // namespace detail

inline UnionCriteriaReport check_union_criteria(const ComponentSpec& a_spec, const ElementTuple& a_tuple,
                                                const ComponentSpec& b_spec, const ElementTuple& b_tuple, int n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (a_spec.parts.empty() || b_spec.parts.empty()) throw InvalidArgument("component spec has no parts");
  if (!(a_spec.parts[0].first.signature() == b_spec.parts[0].first.signature()) ||
      a_spec.tag_relation_name != b_spec.tag_relation_name)
    throw InvalidArgument("component specs have different signatures");
  if (a_tuple.size() != b_tuple.size()) throw InvalidArgument("tuples have different lengths");
  auto ua = detail::index_union(a_spec);
  auto ub = detail::index_union(b_spec);
  check_tuple(ua.whole, a_tuple);
  check_tuple(ub.whole, b_tuple);

  UnionCriteriaReport rep;
  rep.n = static_cast<std::size_t>(n);
  for (const auto& p : a_spec.parts) rep.multiplicities_a.push_back(p.second);
  for (const auto& p : b_spec.parts) rep.multiplicities_b.push_back(p.second);

  // (A) same E-pattern
  rep.cond_a = true;
  for (std::size_t k = 0; k < a_tuple.size() && rep.cond_a; ++k)
    for (std::size_t l = 0; l < a_tuple.size(); ++l)
      if ((ua.copy_of[a_tuple[k]] == ua.copy_of[a_tuple[l]]) != (ub.copy_of[b_tuple[k]] == ub.copy_of[b_tuple[l]])) {
        rep.cond_a = false;
        rep.counterexample_a = std::make_pair(k, l);
        break;
      }

  // (B) per E-class group, the local tuples compare at n
  if (rep.cond_a) {
    rep.cond_b = true;
    std::vector<bool> done(a_tuple.size(), false);
    std::size_t group = 0;
    for (std::size_t k = 0; k < a_tuple.size() && rep.cond_b; ++k) {
      if (done[k]) continue;
      const std::size_t ca = ua.copy_of[a_tuple[k]], cb = ub.copy_of[b_tuple[k]];
      ElementTuple la, lb;
      for (std::size_t l = k; l < a_tuple.size(); ++l)
        if (ua.copy_of[a_tuple[l]] == ca) {
          done[l] = true;
          la.push_back(a_tuple[l] - ua.base_of[ca]);
          lb.push_back(b_tuple[l] - ub.base_of[cb]);
        }
      const Structure& pa = a_spec.parts[ua.part_of[ca]].first;
      const Structure& pb = b_spec.parts[ub.part_of[cb]].first;
      GameSolver solver(pa, pb);
      if (!solver.geq(la, lb, n)) {
        rep.cond_b = false;
        rep.counterexample_b = group;
      }
      ++group;
    }
  }

  // (C) every A part dominates some B part at n; (D) every B part at n-1 some A part
  rep.cond_c = true;
  for (std::size_t i = 0; i < a_spec.parts.size() && rep.cond_c; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < b_spec.parts.size() && !any; ++j)
      any = GameSolver(a_spec.parts[i].first, b_spec.parts[j].first).geq({}, {}, n);
    if (!any) {
      rep.cond_c = false;
      rep.counterexample_c = i;
    }
  }
  rep.cond_d = true;
  for (std::size_t j = 0; j < b_spec.parts.size() && rep.cond_d; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < a_spec.parts.size() && !any; ++i)
      any = GameSolver(b_spec.parts[j].first, a_spec.parts[i].first).geq({}, {}, n - 1);
    if (!any) {
      rep.cond_d = false;
      rep.counterexample_d = j;
    }
  }

  if (rep.cond_a && rep.cond_b && rep.cond_c && rep.cond_d) {
    rep.conclusion_checked = true;
    rep.conclusion = GameSolver(ua.whole, ub.whole).geq(a_tuple, b_tuple, n);
  }
  return rep;
}

struct UnionRefutationReport {
  std::size_t n = 0;
  /// A part of B that no part of A dominates at n-1.
  std::optional<std::size_t> witness_part;
  bool asserted = false;
  /// B ≥_n A fails on the full unions (meaningful when asserted).
  bool verified = false;
};

inline UnionRefutationReport check_union_refutation(const ComponentSpec& a_spec, const ComponentSpec& b_spec, int n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (a_spec.parts.empty() || b_spec.parts.empty()) throw InvalidArgument("component spec has no parts");
  if (!(a_spec.parts[0].first.signature() == b_spec.parts[0].first.signature()))
    throw InvalidArgument("component specs have different signatures");
  UnionRefutationReport rep;
  rep.n = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < b_spec.parts.size() && !rep.witness_part; ++j) {
    bool dominated = false;
    for (std::size_t i = 0; i < a_spec.parts.size() && !dominated; ++i)
      dominated = GameSolver(a_spec.parts[i].first, b_spec.parts[j].first).geq({}, {}, n - 1);
    if (!dominated) rep.witness_part = j;
  }
  if (rep.witness_part) {
    rep.asserted = true;
    Structure a = disjoint_union(a_spec), b = disjoint_union(b_spec);
    rep.verified = !GameSolver(b, a).geq({}, {}, n);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Interval factoring for linear orders

struct IntervalSegment {
  std::vector<Element> a_elements, b_elements;  // increasing
  bool verdict = false;                          // segment of a ≥_n segment of b
};

struct IntervalFactoringReport {
  std::vector<IntervalSegment> segments;  // k+1 segments, with virtual end points
  bool direct = false;
  bool factored = false;
  bool agree = false;
};

namespace detail {

inline std::vector<std::vector<Element>> order_segments(const Structure& s, const ElementTuple& t) {
  // position of each element in the order
  std::vector<Element> sorted(s.size());
  for (Element e = 0; e < s.size(); ++e) sorted[e] = e;
  std::sort(sorted.begin(), sorted.end(), [&](Element x, Element y) { return s.holds(0, {x, y}); });
  std::vector<std::vector<Element>> segs(t.size() + 1);
  std::size_t seg = 0;
  for (Element e : sorted) {
    if (seg < t.size() && e == t[seg]) {
      ++seg;
      continue;
    }
    segs[seg].push_back(e);
  }
  return segs;
}

inline void check_increasing(const Structure& s, const ElementTuple& t) {
  check_tuple(s, t);
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!s.holds(0, {t[i], t[i + 1]})) throw InvalidArgument("tuple is not strictly increasing");
}

}  // namespace detail

inline IntervalFactoringReport interval_factoring_check(const Structure& a, const ElementTuple& a_tuple,
                                                        const Structure& b, const ElementTuple& b_tuple, int n) {
  if (a.signature().size() != 1 || a.signature()[0].arity != 2 || !(a.signature() == b.signature()))
    throw InvalidArgument("linear orders need a single binary relation");
  if (!is_strict_linear_order(a) || !is_strict_linear_order(b)) throw InvalidArgument("input is not a linear order");
  if (a_tuple.size() != b_tuple.size()) throw InvalidArgument("tuples have different lengths");
  if (n < 0) throw InvalidArgument("n must be non-negative");
  detail::check_increasing(a, a_tuple);
  detail::check_increasing(b, b_tuple);

  IntervalFactoringReport rep;
  rep.direct = GameSolver(a, b).geq(a_tuple, b_tuple, n);
  auto sa = detail::order_segments(a, a_tuple);
  auto sb = detail::order_segments(b, b_tuple);
  rep.factored = true;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    IntervalSegment seg{sa[i], sb[i], false};
    Structure ia = induced_substructure(a, sa[i]);
    Structure ib = induced_substructure(b, sb[i]);
    seg.verdict = GameSolver(ia, ib).geq({}, {}, n);
    rep.factored = rep.factored && seg.verdict;
    rep.segments.push_back(std::move(seg));
  }
  rep.agree = rep.direct == rep.factored;
  return rep;
}

}  // namespace bnf
