#pragma once

// Formula synthesis from structures and game positions.
//
// Tuple formulas use the free variables x0..x(k-1) for a k-tuple; quantified
// blocks extend the numbering (x(k), x(k+1), ...), so subformulas built for
// longer tuples plug in without renaming.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bnf/classify.hpp"
#include "bnf/error.hpp"
#include "bnf/formula.hpp"
#include "bnf/game.hpp"
#include "bnf/structure.hpp"

namespace bnf {

// ---------------------------------------------------------------------------
// Substitution

namespace detail {

inline Formula rename_free_impl(const Formula& f, const std::map<std::string, std::string>& sub,
                                const std::set<std::string>& incoming, std::size_t& fresh) {
  switch (f.kind()) {
    case FormulaKind::Atomic: {
      std::vector<std::string> vs = f.vars();
      bool changed = false;
      for (auto& v : vs)
        if (auto it = sub.find(v); it != sub.end()) {
          v = it->second;
          changed = true;
        }
      return changed ? Formula::atom(f.relation(), std::move(vs), f.positive()) : f;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(rename_free_impl(c, sub, incoming, fresh));
      return f.kind() == FormulaKind::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::map<std::string, std::string> inner = sub;
      std::vector<std::string> vars = f.vars();
      for (auto& v : vars) {
        inner.erase(v);
        if (incoming.count(v)) {
          std::string nv;
          do nv = "_r" + std::to_string(fresh++);
          while (incoming.count(nv));
          inner[v] = nv;
          v = nv;
        }
      }
      Formula body = inner.empty() ? f.body() : rename_free_impl(f.body(), inner, incoming, fresh);
      return f.kind() == FormulaKind::Exists ? Formula::exists(std::move(vars), std::move(body))
                                             : Formula::forall(std::move(vars), std::move(body));
    }
  }
  return f;
}

}  // namespace detail

/// Capture-avoiding renaming of free variables.
inline Formula rename_free(const Formula& f, const std::map<std::string, std::string>& sub) {
  std::set<std::string> incoming;
  for (const auto& [k, v] : sub) incoming.insert(v);
  std::size_t fresh = 0;
  return detail::rename_free_impl(f, sub, incoming, fresh);
}

// ---------------------------------------------------------------------------
// Atomic diagrams

/// θ_a(x0..x(k-1)): the conjunction of literals fixing the atomic type of a in m.
inline Formula atomic_diagram(const Structure& m, const ElementTuple& a) {
  check_tuple(m, a);
  std::vector<Formula> lits;
  std::vector<std::size_t> reps;  // first occurrence of each distinct element
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool first = true;
    for (std::size_t j = 0; j < i; ++j) {
      if (a[i] == a[j]) first = false;
      lits.push_back(Formula::equal(var_name(j), var_name(i), a[i] == a[j]));
    }
    if (first) reps.push_back(i);
  }
  for (std::size_t r = 0; r < m.signature().size(); ++r) {
    const std::size_t k = m.signature()[r].arity;
    if (reps.empty()) break;
    std::vector<std::size_t> ctr(k, 0);
    ElementTuple t(k);
    std::vector<std::string> names(k);
    while (true) {
      for (std::size_t q = 0; q < k; ++q) {
        t[q] = a[reps[ctr[q]]];
        names[q] = var_name(reps[ctr[q]]);
      }
      lits.push_back(Formula::atom(m.signature()[r].name, names, m.holds(r, t)));
      std::size_t q = k;
      bool more = false;
      while (q-- > 0) {
        if (++ctr[q] < reps.size()) {
          more = true;
          break;
        }
        ctr[q] = 0;
      }
      if (!more) break;
    }
  }
  return Formula::conj(std::move(lits));
}

/// A literal over x0..x(k-1) true at a in m and false at b in n; nullopt if the atomic types agree.
inline std::optional<Formula> atomic_difference(const Structure& m, const ElementTuple& a, const Structure& n,
                                                const ElementTuple& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return Formula::equal(var_name(j), var_name(i), a[i] == a[j]);
  for (std::size_t r = 0; r < m.signature().size(); ++r) {
    const std::size_t k = m.signature()[r].arity;
    if (a.empty()) break;
    std::vector<std::size_t> ctr(k, 0);
    ElementTuple ta(k), tb(k);
    while (true) {
      for (std::size_t q = 0; q < k; ++q) {
        ta[q] = a[ctr[q]];
        tb[q] = b[ctr[q]];
      }
      const bool va = m.holds(r, ta);
      if (va != n.holds(r, tb)) {
        std::vector<std::string> names;
        for (std::size_t q = 0; q < k; ++q) names.push_back(var_name(ctr[q]));
        return Formula::atom(m.signature()[r].name, names, va);
      }
      std::size_t q = k;
      bool more = false;
      while (q-- > 0) {
        if (++ctr[q] < a.size()) {
          more = true;
          break;
        }
        ctr[q] = 0;
      }
      if (!more) break;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Distinguishing formulas

namespace detail {

class Distinguisher {
 public:
  explicit Distinguisher(GameSolver& solver) : solver_(solver) {}

  // Formula true at the left tuple and false at the right tuple of the
  // failing position (dir 0: (M,a) ≤ (N,b); dir 1: (N,b) ≤ (M,a)).
  Formula build(const ElementTuple& a, const ElementTuple& b, int clock, int dir) {
    const Structure& left = dir == 0 ? solver_.m() : solver_.n();
    const Structure& right = dir == 0 ? solver_.n() : solver_.m();
    const ElementTuple& lt = dir == 0 ? a : b;
    const ElementTuple& rt = dir == 0 ? b : a;
    if (auto lit = atomic_difference(left, lt, right, rt)) return *lit;

    int c0 = 1;
    while (c0 <= clock && solver_.holds(pairs(a, b), c0, dir)) ++c0;
    if (c0 > clock) throw ContractViolation("distinguishing_formula called on a holding position");

    const ElementTuple d = solver_.spoiler_witness(a, b, c0, dir);
    const std::size_t k = a.size();
    std::vector<std::string> ys = var_names(k, d.size());

    ElementTuple rt_ext = rt;
    rt_ext.insert(rt_ext.end(), d.begin(), d.end());
    std::vector<Formula> disjuncts;
    // Replies of a different atomic type are all refuted by one literal set.
    disjuncts.push_back(negate(atomic_diagram(right, rt_ext)));

    ElementTuple c(d.size());
    enumerate_replies(left, lt, right, rt_ext, c, 0, [&](const ElementTuple& reply) {
      ElementTuple a2 = a, b2 = b;
      if (dir == 0) {
        a2.insert(a2.end(), reply.begin(), reply.end());
        b2.insert(b2.end(), d.begin(), d.end());
      } else {
        a2.insert(a2.end(), d.begin(), d.end());
        b2.insert(b2.end(), reply.begin(), reply.end());
      }
      disjuncts.push_back(negate(build(a2, b2, c0 - 1, 1 - dir)));
    });
    return Formula::forall(ys, Formula::disj(std::move(disjuncts)));
  }

 private:
  static detail::PairSet pairs(const ElementTuple& a, const ElementTuple& b) {
    detail::PairSet p;
    for (std::size_t i = 0; i < a.size(); ++i) p.emplace_back(a[i], b[i]);
    detail::normalize(p);
    return p;
  }

  // Calls f on every reply c (tuple in `left`) such that lt+c has the atomic
  // type of rt_ext in `right`.
  template <class F>
  void enumerate_replies(const Structure& left, const ElementTuple& lt, const Structure& right,
                         const ElementTuple& rt_ext, ElementTuple& c, std::size_t i, F&& f) {
    if (i == c.size()) {
      f(c);
      return;
    }
    ElementTuple lx = lt;
    lx.insert(lx.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
    ElementTuple rx(rt_ext.begin(), rt_ext.begin() + static_cast<std::ptrdiff_t>(lt.size() + i + 1));
    for (Element e = 0; e < left.size(); ++e) {
      lx.push_back(e);
      if (same_atomic_type(left, lx, right, rx)) {
        c[i] = e;
        enumerate_replies(left, lt, right, rt_ext, c, i + 1, f);
      }
      lx.pop_back();
    }
  }

  GameSolver& solver_;
};

}  // namespace detail

/// A formula φ(x0..x(k-1)) with pi_rank ≤ clock, true at the left tuple and
/// false at the right tuple.  Requires the position to fail.
inline Formula distinguishing_formula(const Position& pos, SolverOptions options = {}) {
  check_position(pos);
  GameSolver solver(*pos.left, *pos.right, options);
  if (solver.leq(pos.left_tuple, pos.right_tuple, pos.clock))
    throw ContractViolation("distinguishing_formula called on a holding position");
  return detail::Distinguisher(solver).build(pos.left_tuple, pos.right_tuple, pos.clock, 0);
}


// ---------------------------------------------------------------------------
// Canonical back-and-forth type formulas

struct CanonicalFormulas {
  /// Defines {(N, b) : (m, a) ≥_n (N, b)}.
  Formula phi;
  /// Defines {(N, b) : (m, a) ≤_n (N, b)}.
  Formula psi;
  /// Universal blocks range over tuple lengths up to this bound.
  std::size_t max_tuple_length = 0;
  int clock = 0;
};

namespace detail {

inline std::vector<ElementTuple> duplicate_free_extensions(const Structure& m, const ElementTuple& a,
                                                           std::size_t max_len) {
  std::vector<char> used(m.size(), 0);
  for (Element e : a) used[e] = 1;
  std::vector<ElementTuple> out{{}};
  std::vector<ElementTuple> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<ElementTuple> next;
    for (const auto& t : frontier)
      for (Element e = 0; e < m.size(); ++e) {
        if (used[e] || std::find(t.begin(), t.end(), e) != t.end()) continue;
        ElementTuple u = t;
        u.push_back(e);
        next.push_back(u);
      }
    if (next.empty()) break;
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

/// Literals saying that some variable of y repeats or coincides with an x.
inline std::vector<Formula> overlap_guards(std::size_t k, std::size_t len) {
  std::vector<Formula> g;
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < k; ++j) g.push_back(Formula::equal(var_name(k + i), var_name(j)));
    for (std::size_t j = 0; j < i; ++j) g.push_back(Formula::equal(var_name(k + i), var_name(k + j)));
  }
  return g;
}

class CanonicalBuilder {
 public:
  CanonicalBuilder(const Structure& m, std::size_t max_len, std::size_t budget)
      : m_(m), max_len_(max_len), budget_(budget) {}

  Formula phi(const ElementTuple& a, int n) {
    if (n == 0) return theta(a);
    auto key = std::make_pair(a, n);
    if (auto it = phi_memo_.find(key); it != phi_memo_.end()) return it->second;
    std::vector<Formula> parts;
    for (const auto& ext : duplicate_free_extensions(m_, a, m_.size())) {
      ElementTuple aa = a;
      aa.insert(aa.end(), ext.begin(), ext.end());
      parts.push_back(Formula::exists(var_names(a.size(), ext.size()), psi(aa, n - 1)));
      charge(1);
    }
    Formula f = Formula::conj(std::move(parts));
    phi_memo_.emplace(key, f);
    return f;
  }

  Formula psi(const ElementTuple& a, int n) {
    if (n == 0) return theta(a);
    auto key = std::make_pair(a, n);
    if (auto it = psi_memo_.find(key); it != psi_memo_.end()) return it->second;
    std::set<Element> distinct(a.begin(), a.end());
    const std::size_t free_count = m_.size() - distinct.size();
    const std::size_t top = std::min(max_len_, free_count + 1);
    std::vector<ElementTuple> exts = duplicate_free_extensions(m_, a, top);
    std::vector<Formula> parts{theta(a)};
    for (std::size_t len = 0; len <= top; ++len) {
      std::vector<Formula> options = overlap_guards(a.size(), len);
      for (const auto& ext : exts) {
        if (ext.size() != len) continue;
        ElementTuple aa = a;
        aa.insert(aa.end(), ext.begin(), ext.end());
        options.push_back(phi(aa, n - 1));
        charge(1);
      }
      parts.push_back(Formula::forall(var_names(a.size(), len), Formula::disj(std::move(options))));
    }
    Formula f = Formula::conj(std::move(parts));
    psi_memo_.emplace(key, f);
    return f;
  }

 private:
  Formula theta(const ElementTuple& a) {
    if (auto it = theta_memo_.find(a); it != theta_memo_.end()) return it->second;
    Formula f = atomic_diagram(m_, a);
    charge(f.children().size() + 1);
    theta_memo_.emplace(a, f);
    return f;
  }

  void charge(std::size_t nodes) {
    used_ += nodes;
    if (used_ > budget_) throw BudgetExceeded("canonical formula exceeds node budget");
  }

  const Structure& m_;
  std::size_t max_len_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::map<ElementTuple, Formula> theta_memo_;
  std::map<std::pair<ElementTuple, int>, Formula> phi_memo_, psi_memo_;
};

}  // namespace detail

/// φ_{a,m,n} and ψ_{a,m,n} over x0..x(k-1).  Universal blocks range over
/// duplicate-free tuples avoiding x of length ≤ max_tuple_length (default
/// |m| + 1, beyond which no reply in m exists and the formulas are exact).
inline CanonicalFormulas canonical_type_formulas(const Structure& m, const ElementTuple& a, int n,
                                                 std::optional<std::size_t> max_tuple_length = std::nullopt,
                                                 std::size_t node_budget = 4'000'000) {
  check_tuple(m, a);
  if (n < 1) throw InvalidArgument("clock must be at least 1");
  if (n > 3) throw BudgetExceeded("canonical formulas are limited to clock 3");
  CanonicalFormulas out;
  out.clock = n;
  out.max_tuple_length = max_tuple_length.value_or(m.size() + 1);
  detail::CanonicalBuilder b(m, out.max_tuple_length, node_budget);
  out.phi = b.phi(a, n);
  out.psi = b.psi(a, n);
  return out;
}

// ---------------------------------------------------------------------------
// Sentences for ≥_1 and ≤_1

/// Π_1 sentence true in N iff N ≥_1 m, for N whose duplicate-free tuples
/// have length ≤ depth_bound or exceed |m| (default depth_bound = |m| + 1).
inline Formula synth_geq1_sentence(const Structure& m, std::optional<std::size_t> depth_bound = std::nullopt) {
  const std::size_t bound = depth_bound.value_or(m.size() + 1);
  std::vector<Formula> parts;
  for (std::size_t len = 1; len <= bound; ++len) {
    std::vector<Formula> options = detail::overlap_guards(0, len);
    std::set<std::string> seen;
    for (const auto& t : detail::duplicate_free_extensions(m, {}, len)) {
      if (t.size() != len) continue;
      Formula th = atomic_diagram(m, t);
      if (seen.insert(to_string(th)).second) options.push_back(th);
    }
    parts.push_back(Formula::forall(var_names(0, len), Formula::disj(std::move(options))));
  }
  return Formula::conj(std::move(parts));
}

/// Conjunction of ∃y θ_a(y) over duplicate-free tuples a of m: true in N iff N ≤_1 m.
inline Formula synth_leq1_sentence(const Structure& m) {
  std::vector<Formula> parts;
  std::set<std::string> seen;
  for (const auto& t : detail::duplicate_free_extensions(m, {}, m.size())) {
    if (t.empty()) continue;
    Formula f = Formula::exists(var_names(0, t.size()), atomic_diagram(m, t));
    if (seen.insert(to_string(f)).second) parts.push_back(f);
  }
  return Formula::conj(std::move(parts));
}

// ---------------------------------------------------------------------------
// Type isolation and Σ normal forms inside a fixed structure

/// Π_beta formula over x0..x(k-1) true at c in m iff (m, c) ≥_beta (m, a).
inline Formula isolate_pi_type(const Structure& m, const ElementTuple& a, int beta, SolverOptions options = {}) {
  check_tuple(m, a);
  if (beta < 0) throw InvalidArgument("beta must be non-negative");
  if (beta > 3) throw BudgetExceeded("type isolation is limited to beta 3");
  if (beta == 0) return atomic_diagram(m, a);
  GameSolver solver(m, m, options);
  detail::Distinguisher dist(solver);
  std::vector<Formula> parts;
  std::set<std::string> seen;
  ElementTuple c(a.size(), 0);
  const std::size_t k = a.size();
  while (true) {
    if (!solver.leq(a, c, beta)) {
      Formula f = dist.build(a, c, beta, 0);
      if (seen.insert(to_string(f)).second) parts.push_back(f);
    }
    std::size_t q = k;
    bool more = false;
    while (q-- > 0) {
      if (++c[q] < m.size()) {
        more = true;
        break;
      }
      c[q] = 0;
    }
    if (!more) break;
  }
  if (parts.empty()) {
    // every tuple dominates a: any valid Π_beta truth will do
    return Formula::truth();
  }
  return parts.size() == 1 ? parts[0] : Formula::conj(std::move(parts));
}

namespace detail {

struct SigmaPiece {
  std::vector<std::string> vars;  // existential block, fresh names
  Formula body;
  int beta = 0;  // 0 for quantifier-free bodies
};

inline void decompose_e(const Formula& f, int alpha, const std::vector<std::string>& prefix,
                        std::vector<SigmaPiece>& out, std::size_t& fresh, const std::set<std::string>& avoid) {
  const bool qf = is_quantifier_free(f);
  if (qf) {
    out.push_back({prefix, f, 0});
    return;
  }
  const ComplexityReport r = classify(f);
  if (alpha >= 2 && r.abar_rank <= alpha - 1) {
    out.push_back({prefix, f, r.abar_rank});
    return;
  }
  if (f.kind() == FormulaKind::Or) {
    for (const auto& c : f.children()) decompose_e(c, alpha, prefix, out, fresh, avoid);
    return;
  }
  if (f.kind() == FormulaKind::Exists) {
    std::map<std::string, std::string> sub;
    std::vector<std::string> vars = prefix;
    for (const auto& v : f.vars()) {
      std::string nv;
      do nv = "_w" + std::to_string(fresh++);
      while (avoid.count(nv));
      sub[v] = nv;
      vars.push_back(nv);
    }
    decompose_e(rename_free(f.body(), sub), alpha, vars, out, fresh, avoid);
    return;
  }
  throw InvalidArgument("formula is not in the E class of the requested rank");
}

inline void collect_names(const Formula& f, std::set<std::string>& out) {
  for (const auto& v : f.vars()) out.insert(v);
  for (const auto& c : f.children()) collect_names(c, out);
}

}  // namespace detail

/// A formula with sigma_rank ≤ alpha agreeing with f on every assignment of
/// its free variables (sorted by name) into m.  Requires e_rank(f) ≤ alpha.
inline Formula internal_sigma(const Structure& m, const Formula& f, int alpha, SolverOptions options = {}) {
  if (alpha < 1) throw InvalidArgument("alpha must be at least 1");
  const ComplexityReport r = classify(f);
  if (r.e_rank > alpha)
    throw InvalidArgument("formula has e_rank " + std::to_string(r.e_rank) + " > " + std::to_string(alpha));
  if (r.sigma_rank <= alpha) return f;

  const std::set<std::string> free_set = free_variables(f);
  const std::vector<std::string> xs(free_set.begin(), free_set.end());
  std::set<std::string> avoid;
  detail::collect_names(f, avoid);
  std::vector<detail::SigmaPiece> pieces;
  std::size_t fresh = 0;
  detail::decompose_e(f, alpha, {}, pieces, fresh, avoid);

  const std::size_t k = xs.size();
  std::vector<CompiledFormula> compiled;
  for (const auto& p : pieces) {
    std::vector<std::string> order = xs;
    order.insert(order.end(), p.vars.begin(), p.vars.end());
    compiled.emplace_back(p.body, m, order);
  }

  std::vector<Formula> disjuncts;
  std::set<std::string> seen;
  std::map<std::string, std::string> to_user;
  for (std::size_t i = 0; i < k; ++i) to_user[var_name(i)] = xs[i];
  ElementTuple a(k, 0);
  if (m.size() == 0 && k > 0) return Formula::falsity();
  while (true) {
    // first piece and least witness satisfied by a
    for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
      const std::size_t w = pieces[pi].vars.size();
      if (w > 0 && m.size() == 0) continue;
      ElementTuple full = a;
      full.resize(k + w, 0);
      bool found = false;
      while (true) {
        if (compiled[pi](full)) {
          found = true;
          break;
        }
        std::size_t q = k + w;
        bool more = false;
        while (q-- > k) {
          if (++full[q] < m.size()) {
            more = true;
            break;
          }
          full[q] = 0;
        }
        if (!more || m.size() == 0) break;
      }
      if (!found) continue;
      Formula iso = isolate_pi_type(m, full, pieces[pi].beta, options);
      Formula d = rename_free(Formula::exists(var_names(k, w), iso), to_user);
      if (seen.insert(to_string(d)).second) disjuncts.push_back(d);
      break;
    }
    std::size_t q = k;
    bool more = false;
    while (q-- > 0) {
      if (++a[q] < m.size()) {
        more = true;
        break;
      }
      a[q] = 0;
    }
    if (!more) break;
  }
  return Formula::disj(std::move(disjuncts));
}

}  // namespace bnf
