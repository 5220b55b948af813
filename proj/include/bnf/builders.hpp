#pragma once

// Builders for the structure families used throughout the library: disjoint
// unions tagged by an equivalence relation, flower graphs of set families,
// the two-level gadget pair, and finite linear orders.  Every builder numbers
// elements deterministically.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnf/error.hpp"
#include "bnf/structure.hpp"

namespace bnf {

/// Accumulates elements and tuples, then freezes into a Structure.
class StructureBuilder {
 public:
  explicit StructureBuilder(Signature signature, std::string name = "")
      : signature_(std::move(signature)), tables_(signature_.size()), name_(std::move(name)) {}

  Element add_element() { return static_cast<Element>(size_++); }
  Element add_elements(std::size_t count) {
    Element first = static_cast<Element>(size_);
    size_ += count;
    return first;
  }
  std::size_t size() const noexcept { return size_; }

  void add(std::size_t relation, ElementTuple t) { tables_[relation].push_back(std::move(t)); }
  void add(std::string_view relation, ElementTuple t) {
    auto idx = signature_.index_of(relation);
    if (!idx) throw InvalidArgument("unknown relation " + std::string(relation));
    add(*idx, std::move(t));
  }

  Structure build() && { return Structure(std::move(signature_), size_, std::move(tables_), std::move(name_)); }

 private:
  Signature signature_;
  std::vector<std::vector<ElementTuple>> tables_;
  std::size_t size_ = 0;
  std::string name_;
};

inline Structure build_linear_order(std::size_t size, std::string relation = "R") {
  StructureBuilder b(Signature({{relation, 2}}), "chain" + std::to_string(size));
  b.add_elements(size);
  for (Element i = 0; i < size; ++i)
    for (Element j = i + 1; j < size; ++j) b.add(0, {i, j});
  return std::move(b).build();
}

/// Checks irreflexivity, transitivity and totality of binary relation `relation`.
inline bool is_strict_linear_order(const Structure& s, std::size_t relation = 0) {
  if (s.signature().size() <= relation || s.signature()[relation].arity != 2) return false;
  const auto n = static_cast<Element>(s.size());
  for (Element x = 0; x < n; ++x) {
    if (s.holds(relation, {x, x})) return false;
    for (Element y = 0; y < n; ++y) {
      if (x != y && s.holds(relation, {x, y}) == s.holds(relation, {y, x})) return false;
      for (Element z = 0; z < n; ++z)
        if (s.holds(relation, {x, y}) && s.holds(relation, {y, z}) && !s.holds(relation, {x, z}))
          return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Families of finite sets

using FamilyMember = std::vector<std::uint32_t>;  // sorted, duplicate-free

/// Non-empty finite family of subsets of {0, ..., universe_bound-1}.
class Family {
 public:
  Family(std::set<FamilyMember> sets, std::size_t universe_bound)
      : sets_(std::move(sets)), universe_bound_(universe_bound) {
    if (universe_bound_ == 0) throw InvalidArgument("family universe bound must be positive");
    if (sets_.empty()) throw InvalidArgument("families must be non-empty");
    for (const auto& s : sets_) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= universe_bound_)
          throw InvalidArgument("family member element " + std::to_string(s[i]) + " outside bound " +
                                std::to_string(universe_bound_));
        if (i > 0 && s[i - 1] >= s[i]) throw InvalidArgument("family members must be sorted sets");
      }
    }
  }

  /// Parses `"{1,2};{3};{}"`.  The bound defaults to one past the largest element.
  static Family parse(std::string_view text, std::size_t universe_bound = 0) {
    std::set<FamilyMember> sets;
    std::size_t max_elem = 0;
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto fail = [&](const std::string& msg) -> void { throw ParseError(msg, 1, pos + 1); };
    while (true) {
      skip();
      if (pos >= text.size() || text[pos] != '{') fail("expected '{'");
      ++pos;
      std::set<std::uint32_t> member;
      skip();
      if (pos < text.size() && text[pos] != '}') {
        while (true) {
          skip();
          std::size_t start = pos;
          std::uint64_t v = 0;
          while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
            if (v > 1'000'000) fail("family element too large");
            ++pos;
          }
          if (start == pos) fail("expected number");
          member.insert(static_cast<std::uint32_t>(v));
          max_elem = std::max<std::size_t>(max_elem, v + 1);
          skip();
          if (pos < text.size() && text[pos] == ',') {
            ++pos;
            continue;
          }
          break;
        }
      }
      skip();
      if (pos >= text.size() || text[pos] != '}') fail("expected '}'");
      ++pos;
      sets.insert(FamilyMember(member.begin(), member.end()));
      skip();
      if (pos >= text.size()) break;
      if (text[pos] != ';') fail("expected ';'");
      ++pos;
    }
    std::size_t bound = universe_bound == 0 ? std::max<std::size_t>(max_elem, 1) : universe_bound;
    return Family(std::move(sets), bound);
  }

  const std::set<FamilyMember>& sets() const noexcept { return sets_; }
  std::size_t universe_bound() const noexcept { return universe_bound_; }

  std::string to_string() const {
    std::string out;
    bool first_set = true;
    for (const auto& s : sets_) {
      if (!first_set) out += ";";
      first_set = false;
      out += "{";
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
      }
      out += "}";
    }
    return out;
  }

  friend bool operator==(const Family&, const Family&) = default;

 private:
  std::set<FamilyMember> sets_;
  std::size_t universe_bound_;
};

inline bool is_subset(const FamilyMember& a, const FamilyMember& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Closure under additions of elements from the bounded universe:
/// { S ∪ F : S in family, F ⊆ {0..u-1} }.
inline Family close_family(const Family& family) {
  const std::size_t u = family.universe_bound();
  if (u > 20) throw BudgetExceeded("universe bound too large to close a family");
  std::set<FamilyMember> out;
  for (const auto& s : family.sets()) {
    std::uint32_t base = 0;
    for (auto e : s) base |= 1u << e;
    const std::uint32_t free = ((1u << u) - 1) & ~base;
    // enumerate all submasks of `free`
    for (std::uint32_t sub = free;; sub = (sub - 1) & free) {
      std::uint32_t mask = base | sub;
      FamilyMember m;
      for (std::uint32_t e = 0; e < u; ++e)
        if (mask & (1u << e)) m.push_back(e);
      out.insert(std::move(m));
      if (sub == 0) break;
    }
  }
  return Family(std::move(out), u);
}

/// Flower graph: for each member S, `copies` components, each a centre with one
/// cycle of length k+3 through it for every k in S.  Relation "E" is the
/// symmetric, irreflexive adjacency.  Numbering: members in family order,
/// copies consecutively, centre first, then cycles in increasing k.
inline Structure build_flower_graph(const Family& family, std::size_t copies) {
  if (copies == 0) throw InvalidArgument("copies must be positive");
  StructureBuilder b(Signature({{"E", 2}}), "flower");
  auto edge = [&](Element x, Element y) {
    b.add(0, {x, y});
    b.add(0, {y, x});
  };
  for (const auto& s : family.sets()) {
    for (std::size_t c = 0; c < copies; ++c) {
      Element centre = b.add_element();
      for (auto k : s) {
        const std::size_t extra = static_cast<std::size_t>(k) + 2;  // cycle length k+3
        Element first = b.add_elements(extra);
        edge(centre, first);
        for (std::size_t i = 0; i + 1 < extra; ++i)
          edge(first + static_cast<Element>(i), first + static_cast<Element>(i + 1));
        edge(first + static_cast<Element>(extra - 1), centre);
      }
    }
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Disjoint unions

struct ComponentSpec {
  std::vector<std::pair<Structure, std::size_t>> parts;  // (component, multiplicity)
  std::string tag_relation_name = "Eq";
};

/// Disjoint union of the listed components; the fresh binary relation
/// `tag_relation_name` is the equivalence "same component copy".
inline Structure disjoint_union(const ComponentSpec& spec) {
  if (spec.parts.empty()) throw InvalidArgument("component spec has no parts");
  const Signature& sig = spec.parts.front().first.signature();
  for (const auto& [comp, mult] : spec.parts) {
    if (!(comp.signature() == sig)) throw InvalidArgument("component signatures differ");
    if (mult == 0) throw InvalidArgument("multiplicity must be positive");
  }
  if (sig.index_of(spec.tag_relation_name))
    throw InvalidArgument("tag relation " + spec.tag_relation_name + " collides with the signature");
  Signature out_sig = sig.with({spec.tag_relation_name, 2});
  const std::size_t tag = sig.size();
  StructureBuilder b(out_sig, "union");
  for (const auto& [comp, mult] : spec.parts) {
    for (std::size_t c = 0; c < mult; ++c) {
      const Element base = b.add_elements(comp.size());
      for (std::size_t r = 0; r < sig.size(); ++r)
        for (const auto& t : comp.table(r)) {
          ElementTuple shifted = t;
          for (auto& e : shifted) e += base;
          b.add(r, std::move(shifted));
        }
      for (Element x = 0; x < comp.size(); ++x)
        for (Element y = 0; y < comp.size(); ++y) b.add(tag, {base + x, base + y});
    }
  }
  return std::move(b).build();
}

/// Component index (position in the expanded copy list) of every element of
/// `disjoint_union(spec)`.
inline std::vector<std::size_t> union_component_of(const ComponentSpec& spec) {
  std::vector<std::size_t> out;
  std::size_t copy = 0;
  for (const auto& [comp, mult] : spec.parts)
    for (std::size_t c = 0; c < mult; ++c, ++copy) out.insert(out.end(), comp.size(), copy);
  return out;
}

// ---------------------------------------------------------------------------
// Two-level gadget pair

/// Finite boolean table over a box of indices.  For the base level the
/// indices are (i, m, j); for one inductive layer they are (i, m, j, m', j'),
/// the last three forming the base-level table of the (i, m) slice.
struct BoolTable {
  std::vector<std::size_t> bounds;
  std::vector<bool> bits;

  BoolTable() = default;
  BoolTable(std::vector<std::size_t> b, bool fill = false) : bounds(std::move(b)) {
    std::size_t n = 1;
    for (auto x : bounds) n *= x;
    bits.assign(n, fill);
  }

  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != bounds.size()) throw InvalidArgument("table index arity mismatch");
    std::size_t off = 0, d = 0;
    for (auto x : idx) {
      if (x >= bounds[d]) throw InvalidArgument("table index out of range");
      off = off * bounds[d++] + x;
    }
    return off;
  }
  bool at(std::initializer_list<std::size_t> idx) const { return bits[offset(idx)]; }
  void set(std::initializer_list<std::size_t> idx, bool v) { bits[offset(idx)] = v; }

  /// The (i, m) slice of a five-index table as a three-index table over (j, m', j').
  BoolTable slice(std::size_t i, std::size_t m) const {
    if (bounds.size() != 5) throw InvalidArgument("slice needs a five-index table");
    BoolTable out({bounds[2], bounds[3], bounds[4]});
    for (std::size_t j = 0; j < bounds[2]; ++j)
      for (std::size_t m2 = 0; m2 < bounds[3]; ++m2)
        for (std::size_t j2 = 0; j2 < bounds[4]; ++j2) out.set({j, m2, j2}, at({i, m, j, m2, j2}));
    return out;
  }
};

/// For a three-index table: ∀m ∃j U(i, m, j).
inline bool lemma21_row_holds(const BoolTable& table, std::size_t i) {
  if (table.bounds.size() == 3) {
    for (std::size_t m = 0; m < table.bounds[1]; ++m) {
      bool any = false;
      for (std::size_t j = 0; j < table.bounds[2] && !any; ++j) any = table.at({i, m, j});
      if (!any) return false;
    }
    return true;
  }
  if (table.bounds.size() == 5) {
    for (std::size_t m = 0; m < table.bounds[1]; ++m) {
      BoolTable sub = table.slice(i, m);
      bool any = false;
      for (std::size_t j = 0; j < table.bounds[2] && !any; ++j) any = lemma21_row_holds(sub, j);
      if (!any) return false;
    }
    return true;
  }
  throw InvalidArgument("gadget tables have three or five indices");
}

struct GadgetPair {
  Structure a;
  Structure b;
};

namespace detail {

inline std::string unary_name(int level, std::size_t i, std::size_t m) {
  return "R" + std::to_string(level) + "_" + std::to_string(i) + "_" + std::to_string(m);
}

inline Signature level2_signature(std::size_t i_bound, std::size_t m_bound) {
  std::vector<RelationSymbol> rels;
  for (std::size_t i = 0; i < i_bound; ++i)
    for (std::size_t m = 0; m < m_bound; ++m) rels.push_back({unary_name(2, i, m), 1});
  return Signature(std::move(rels));
}

// Base level.  Replicas a^s_{i',m,j} for s < truncation; B_i additionally has
// b*_m in R2_{i,m}.  Where some j satisfies U(i,m,j), b*_m takes the place of
// the last replica of the least such j, so B_i ≅ A whenever row i holds.
inline GadgetPair lemma21_base(const BoolTable& u, std::size_t i, std::size_t truncation,
                               std::size_t budget) {
  const std::size_t I = u.bounds[0], M = u.bounds[1], J = u.bounds[2];
  if (i >= I) throw InvalidArgument("row index out of range");
  if (I * M * J * truncation + M > budget) throw BudgetExceeded("gadget exceeds the element budget");
  Signature sig = level2_signature(I, M);
  StructureBuilder a(sig, "A"), b(sig, "B" + std::to_string(i));
  for (std::size_t i2 = 0; i2 < I; ++i2)
    for (std::size_t m = 0; m < M; ++m) {
      std::optional<std::size_t> absorb;
      if (i2 == i)
        for (std::size_t j = 0; j < J && !absorb; ++j)
          if (u.at({i, m, j})) absorb = j;
      for (std::size_t j = 0; j < J; ++j) {
        const bool in = u.at({i2, m, j});
        for (std::size_t s = 0; s < truncation; ++s) {
          Element x = a.add_element();
          if (in) a.add(sig.index_of(unary_name(2, i2, m)).value(), {x});
          if (absorb && *absorb == j && s + 1 == truncation) continue;
          Element y = b.add_element();
          if (in) b.add(sig.index_of(unary_name(2, i2, m)).value(), {y});
        }
      }
    }
  for (std::size_t m = 0; m < M; ++m) {
    Element star = b.add_element();
    b.add(sig.index_of(unary_name(2, i, m)).value(), {star});
  }
  return {std::move(a).build(), std::move(b).build()};
}

}  // namespace detail

/// Builds (A, B_i) for n = 2 (three-index table) or n = 3 (five-index table),
/// replacing each "infinitely many" by `truncation` replicas.
inline GadgetPair build_lemma21_pair(int n, const BoolTable& table, std::size_t i, std::size_t truncation,
                                     std::size_t budget = 256) {
  if (truncation == 0) throw InvalidArgument("truncation must be positive");
  if (n == 2) {
    if (table.bounds.size() != 3) throw InvalidArgument("n = 2 needs a table over (i, m, j)");
    return detail::lemma21_base(table, i, truncation, budget);
  }
  if (n != 3) throw InvalidArgument("only n = 2 and n = 3 are supported");
  if (table.bounds.size() != 5) throw InvalidArgument("n = 3 needs a table over (i, m, j, m', j')");
  const std::size_t I = table.bounds[0], M = table.bounds[1], J = table.bounds[2];
  if (i >= I) throw InvalidArgument("row index out of range");

  // Lower-level pieces per slice: A^{U_{i',m}} and B^{U_{i',m}}_j.
  struct Slice {
    Structure a;
    std::vector<Structure> b;
    std::optional<std::size_t> absorb;
  };
  std::vector<Slice> slices;
  std::size_t total = 0;
  for (std::size_t i2 = 0; i2 < I; ++i2)
    for (std::size_t m = 0; m < M; ++m) {
      BoolTable sub = table.slice(i2, m);
      Slice sl;
      for (std::size_t j = 0; j < J; ++j) {
        auto pair = detail::lemma21_base(sub, j, truncation, budget);
        if (j == 0) sl.a = pair.a;
        sl.b.push_back(std::move(pair.b));
        total += sl.b.back().size() * truncation;
        if (i2 == i && !sl.absorb && lemma21_row_holds(sub, j)) sl.absorb = j;
      }
      if (i2 == i) total += sl.a.size();
      if (total > budget) throw BudgetExceeded("gadget exceeds the element budget");
      slices.push_back(std::move(sl));
    }

  const std::size_t M2 = table.bounds[3];
  std::vector<RelationSymbol> rels = detail::level2_signature(J, M2).relations();
  for (std::size_t i2 = 0; i2 < I; ++i2)
    for (std::size_t m = 0; m < M; ++m) rels.push_back({detail::unary_name(3, i2, m), 1});
  rels.push_back({"E3", 2});
  Signature sig(std::move(rels));
  const std::size_t e3 = sig.size() - 1;

  auto add_class = [&](StructureBuilder& out, const Structure& comp, std::size_t sort_rel) {
    const Element base = out.add_elements(comp.size());
    for (std::size_t r = 0; r < comp.signature().size(); ++r) {
      const std::size_t target = sig.index_of(comp.signature()[r].name).value();
      for (const auto& t : comp.table(r)) out.add(target, {t[0] + base});
    }
    for (Element x = 0; x < comp.size(); ++x) {
      out.add(sort_rel, {base + x});
      for (Element y = 0; y < comp.size(); ++y) out.add(e3, {base + x, base + y});
    }
  };

  StructureBuilder a(sig, "A"), b(sig, "B" + std::to_string(i));
  std::size_t idx = 0;
  for (std::size_t i2 = 0; i2 < I; ++i2)
    for (std::size_t m = 0; m < M; ++m, ++idx) {
      const Slice& sl = slices[idx];
      const std::size_t sort_rel = sig.index_of(detail::unary_name(3, i2, m)).value();
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t s = 0; s < truncation; ++s) {
          add_class(a, sl.b[j], sort_rel);
          if (sl.absorb && *sl.absorb == j && s + 1 == truncation) continue;
          add_class(b, sl.b[j], sort_rel);
        }
      if (i2 == i) add_class(b, sl.a, sort_rel);
    }
  return {std::move(a).build(), std::move(b).build()};
}

}  // namespace bnf
