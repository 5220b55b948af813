#pragma once

// Syntactic complexity of NNF formulas in two hierarchies:
//   Σ/Π counts every alternation of ⋁∃ and ⋀∀ blocks;
//   E/A (and their closures Ē/Ā under ⋁ and ⋀) only counts alternations of
//   quantifiers, absorbing junctions.
// Quantifier-free formulas have sigma = pi = 0 and e = a = ebar = abar = 1.

#include <algorithm>
#include <limits>
#include <string>

#include "bnf/formula.hpp"

namespace bnf {

struct ComplexityReport {
  int sigma_rank = 0;
  int pi_rank = 0;
  int e_rank = 1;
  int a_rank = 1;
  int ebar_rank = 1;
  int abar_rank = 1;
  /// Least α such that the formula is a conjunction of universally quantified E_α parts.
  int forall_e_rank = 1;

  friend bool operator==(const ComplexityReport&, const ComplexityReport&) = default;
};

namespace detail {

inline ComplexityReport classify_node(const Formula& f) {
  constexpr int inf = std::numeric_limits<int>::max() / 4;
  ComplexityReport r;
  if (is_quantifier_free(f)) return r;

  std::vector<ComplexityReport> kids;
  for (const auto& c : f.children()) kids.push_back(classify_node(c));
  auto max_of = [&](auto field, int floor) {
    int m = floor;
    for (const auto& k : kids) m = std::max(m, k.*field);
    return m;
  };

  switch (f.kind()) {
    case FormulaKind::Or:
      r.sigma_rank = max_of(&ComplexityReport::sigma_rank, 1);
      r.pi_rank = r.sigma_rank + 1;
      break;
    case FormulaKind::And:
      r.pi_rank = max_of(&ComplexityReport::pi_rank, 1);
      r.sigma_rank = r.pi_rank + 1;
      break;
    case FormulaKind::Exists:
      r.sigma_rank = std::max(1, kids[0].sigma_rank);
      r.pi_rank = r.sigma_rank + 1;
      break;
    case FormulaKind::Forall:
      r.pi_rank = std::max(1, kids[0].pi_rank);
      r.sigma_rank = r.pi_rank + 1;
      break;
    case FormulaKind::Atomic:
      break;
  }

  // Structural candidates that do not depend on this node's own ranks.
  int e_struct = r.sigma_rank <= 1 ? 1 : inf;
  int a_struct = r.pi_rank <= 1 ? 1 : inf;
  if (f.kind() == FormulaKind::Exists) e_struct = std::min(e_struct, std::max(2, kids[0].e_rank));
  if (f.kind() == FormulaKind::Or) e_struct = std::min(e_struct, max_of(&ComplexityReport::e_rank, 2));
  if (f.kind() == FormulaKind::Forall) a_struct = std::min(a_struct, std::max(2, kids[0].a_rank));
  if (f.kind() == FormulaKind::And) a_struct = std::min(a_struct, max_of(&ComplexityReport::a_rank, 2));
  int ebar_junction = inf, abar_junction = inf;
  if (f.is_junction()) {
    ebar_junction = max_of(&ComplexityReport::ebar_rank, 1);
    abar_junction = max_of(&ComplexityReport::abar_rank, 1);
  }

  // E_α ⊇ Ā_β and A_α ⊇ Ē_β for β < α: iterate to the least fixpoint.
  int e = inf, a = inf, eb = inf, ab = inf;
  while (true) {
    int ne = std::min(e_struct, ab >= inf ? inf : ab + 1);
    int na = std::min(a_struct, eb >= inf ? inf : eb + 1);
    int neb = std::min(ne, ebar_junction);
    int nab = std::min(na, abar_junction);
    if (ne == e && na == a && neb == eb && nab == ab) break;
    e = ne;
    a = na;
    eb = neb;
    ab = nab;
  }
  r.e_rank = e;
  r.a_rank = a;
  r.ebar_rank = eb;
  r.abar_rank = ab;

  r.forall_e_rank = r.e_rank;
  if (f.kind() == FormulaKind::And) r.forall_e_rank = std::min(r.e_rank, max_of(&ComplexityReport::forall_e_rank, 1));
  if (f.kind() == FormulaKind::Forall) r.forall_e_rank = std::min(r.e_rank, kids[0].forall_e_rank);
  return r;
}

}  // namespace detail

/// Ranks of an NNF formula (every Formula value is in NNF).
inline ComplexityReport classify(const Formula& f) { return detail::classify_node(f); }

enum class FormulaClass { Sigma, Pi, E, A, EBar, ABar };

inline int rank_of(const ComplexityReport& r, FormulaClass c) {
  switch (c) {
    case FormulaClass::Sigma: return r.sigma_rank;
    case FormulaClass::Pi: return r.pi_rank;
    case FormulaClass::E: return r.e_rank;
    case FormulaClass::A: return r.a_rank;
    case FormulaClass::EBar: return r.ebar_rank;
    case FormulaClass::ABar: return r.abar_rank;
  }
  return 0;
}

inline std::string class_name(FormulaClass c) {
  switch (c) {
    case FormulaClass::Sigma: return "sigma";
    case FormulaClass::Pi: return "pi";
    case FormulaClass::E: return "e";
    case FormulaClass::A: return "a";
    case FormulaClass::EBar: return "ebar";
    case FormulaClass::ABar: return "abar";
  }
  return "";
}

inline FormulaClass parse_class(const std::string& s) {
  for (auto c : {FormulaClass::Sigma, FormulaClass::Pi, FormulaClass::E, FormulaClass::A, FormulaClass::EBar,
                 FormulaClass::ABar})
    if (class_name(c) == s) return c;
  throw InvalidArgument("unknown formula class '" + s + "'");
}

}  // namespace bnf
