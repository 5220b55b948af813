#pragma once

// Finite relational structures and their line-oriented text format.
//
//   structure <name>
//   signature R/2 U/1
//   universe 3
//   rel R: (0,1) (1,2)
//   rel U: (0)
//
// Blank lines and '#' comments are ignored.  `rel` lines may be omitted for
// empty relations.  The serializer always writes one `rel` line per symbol,
// with tuples in lexicographic order.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bnf/error.hpp"

namespace bnf {

using Element = std::uint32_t;
using ElementTuple = std::vector<Element>;

struct RelationSymbol {
  std::string name;
  std::size_t arity = 0;

  friend bool operator==(const RelationSymbol&, const RelationSymbol&) = default;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

/// Purely relational signature: an ordered list of named symbols.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<RelationSymbol> relations) : relations_(std::move(relations)) {
    std::unordered_set<std::string> seen;
    for (const auto& r : relations_) {
      if (!is_identifier(r.name)) throw InvalidArgument("invalid relation name '" + r.name + "'");
      if (r.arity == 0) throw InvalidArgument("relation " + r.name + " must have arity >= 1");
      if (!seen.insert(r.name).second) throw InvalidArgument("duplicate relation name " + r.name);
    }
  }

  const std::vector<RelationSymbol>& relations() const noexcept { return relations_; }
  std::size_t size() const noexcept { return relations_.size(); }
  const RelationSymbol& operator[](std::size_t i) const { return relations_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name == name) return i;
    return std::nullopt;
  }

  Signature with(RelationSymbol extra) const {
    auto rels = relations_;
    rels.push_back(std::move(extra));
    return Signature(std::move(rels));
  }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<RelationSymbol> relations_;
};

/// A finite structure with universe {0, ..., size-1}.  Immutable once built.
class Structure {
 public:
  Structure() = default;

  Structure(Signature signature, std::size_t size, std::vector<std::vector<ElementTuple>> tables,
            std::string name = "")
      : signature_(std::move(signature)), size_(size), tables_(std::move(tables)), name_(std::move(name)) {
    if (tables_.size() < signature_.size()) tables_.resize(signature_.size());
    if (tables_.size() != signature_.size())
      throw InvalidArgument("more relation tables than signature symbols");
    bits_.resize(tables_.size());
    for (std::size_t r = 0; r < tables_.size(); ++r) {
      auto& table = tables_[r];
      const std::size_t arity = signature_[r].arity;
      for (const auto& t : table) {
        if (t.size() != arity)
          throw InvalidArgument("tuple of length " + std::to_string(t.size()) + " in relation " +
                                signature_[r].name + " of arity " + std::to_string(arity));
        for (Element e : t)
          if (e >= size_)
            throw InvalidArgument("element " + std::to_string(e) + " out of range in relation " +
                                  signature_[r].name);
      }
      std::sort(table.begin(), table.end());
      table.erase(std::unique(table.begin(), table.end()), table.end());

      std::size_t cells = 1;
      for (std::size_t i = 0; i < arity; ++i) {
        if (size_ != 0 && cells > (std::size_t{1} << 28) / size_)
          throw BudgetExceeded("relation " + signature_[r].name + " too large for a dense table");
        cells *= size_;
      }
      bits_[r].assign(size_ == 0 ? 0 : cells, false);
      for (const auto& t : table) bits_[r][offset(t)] = true;
    }
  }

  const Signature& signature() const noexcept { return signature_; }
  std::size_t size() const noexcept { return size_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<ElementTuple>& table(std::size_t r) const { return tables_[r]; }
  const std::vector<std::vector<ElementTuple>>& tables() const noexcept { return tables_; }

  /// Membership test; `args` must have the relation's arity and in-range entries.
  template <class Range>
  bool holds(std::size_t relation, const Range& args) const {
    std::size_t off = 0;
    for (Element e : args) off = off * size_ + e;
    return bits_[relation][off];
  }

  bool holds(std::size_t relation, std::initializer_list<Element> args) const {
    std::size_t off = 0;
    for (Element e : args) off = off * size_ + e;
    return bits_[relation][off];
  }

  Structure renamed(std::string name) const {
    Structure copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

  friend bool operator==(const Structure& a, const Structure& b) {
    return a.signature_ == b.signature_ && a.size_ == b.size_ && a.tables_ == b.tables_;
  }

 private:
  std::size_t offset(const ElementTuple& t) const {
    std::size_t off = 0;
    for (Element e : t) off = off * size_ + e;
    return off;
  }

  Signature signature_;
  std::size_t size_ = 0;
  std::vector<std::vector<ElementTuple>> tables_;
  std::vector<std::vector<bool>> bits_;
  std::string name_;
};

inline void check_tuple(const Structure& s, const ElementTuple& t) {
  for (Element e : t)
    if (e >= s.size())
      throw InvalidArgument("element " + std::to_string(e) + " out of range for structure of size " +
                            std::to_string(s.size()));
}

/// True when the two tuples satisfy exactly the same atomic formulas,
/// equality included.  Signatures must match.
inline bool same_atomic_type(const Structure& m, const ElementTuple& a, const Structure& n,
                             const ElementTuple& b) {
  if (a.size() != b.size()) return false;
  const std::size_t k = a.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  std::vector<std::size_t> idx;
  std::vector<Element> ta, tb;
  for (std::size_t r = 0; r < m.signature().size(); ++r) {
    const std::size_t arity = m.signature()[r].arity;
    if (k == 0) continue;
    idx.assign(arity, 0);
    ta.resize(arity);
    tb.resize(arity);
    while (true) {
      for (std::size_t p = 0; p < arity; ++p) {
        ta[p] = a[idx[p]];
        tb[p] = b[idx[p]];
      }
      if (m.holds(r, ta) != n.holds(r, tb)) return false;
      std::size_t p = arity;
      while (p > 0 && ++idx[p - 1] == k) idx[--p] = 0;
      if (p == 0) break;
    }
  }
  return true;
}

inline std::string tuple_to_string(const ElementTuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

inline std::string serialize_structure(const Structure& s) {
  std::ostringstream out;
  out << "structure " << (s.name().empty() ? "unnamed" : s.name()) << "\n";
  out << "signature";
  for (const auto& r : s.signature().relations()) out << " " << r.name << "/" << r.arity;
  out << "\n";
  out << "universe " << s.size() << "\n";
  for (std::size_t r = 0; r < s.signature().size(); ++r) {
    out << "rel " << s.signature()[r].name << ":";
    for (const auto& t : s.table(r)) out << " " << tuple_to_string(t);
    out << "\n";
  }
  return out.str();
}

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < line_.size() ? line_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < line_.size() &&
           (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
      ++pos_;
    std::string id(line_.substr(start, pos_ - start));
    if (!is_identifier(id)) {
      pos_ = start;
      fail("expected identifier");
    }
    return id;
  }
  std::size_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(line_[pos_] - '0');
      if (value > (std::size_t{1} << 32)) fail("number too large");
      ++pos_;
    }
    if (start == pos_) fail("expected number");
    return value;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_no_, pos_ + 1); }
  std::size_t column() const { return pos_ + 1; }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the text format described at the top of this header.
inline Structure parse_structure(std::string_view text) {
  std::string name;
  std::optional<Signature> signature;
  std::optional<std::size_t> universe;
  std::vector<std::vector<ElementTuple>> tables;
  std::vector<bool> seen_rel;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    detail::LineCursor cur(line, line_no);
    if (cur.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    std::string keyword = cur.identifier();
    if (keyword == "structure") {
      if (signature || universe || !name.empty()) cur.fail("'structure' must be the first line");
      name = cur.identifier();
    } else if (keyword == "signature") {
      if (signature) cur.fail("duplicate 'signature' line");
      std::vector<RelationSymbol> rels;
      while (!cur.at_end()) {
        RelationSymbol r;
        r.name = cur.identifier();
        cur.expect('/');
        r.arity = cur.number();
        if (r.arity == 0) cur.fail("arity must be positive");
        for (const auto& other : rels)
          if (other.name == r.name) cur.fail("duplicate relation " + r.name);
        rels.push_back(r);
      }
      signature = Signature(std::move(rels));
      tables.assign(signature->size(), {});
      seen_rel.assign(signature->size(), false);
    } else if (keyword == "universe") {
      if (!signature) cur.fail("'universe' before 'signature'");
      if (universe) cur.fail("duplicate 'universe' line");
      universe = cur.number();
    } else if (keyword == "rel") {
      if (!signature || !universe) cur.fail("'rel' before 'signature' and 'universe'");
      std::string rname = cur.identifier();
      auto idx = signature->index_of(rname);
      if (!idx) cur.fail("unknown relation " + rname);
      if (seen_rel[*idx]) cur.fail("duplicate 'rel' line for " + rname);
      seen_rel[*idx] = true;
      cur.expect(':');
      const std::size_t arity = (*signature)[*idx].arity;
      while (!cur.at_end()) {
        ElementTuple t;
        cur.expect('(');
        if (cur.peek() != ')') {
          while (true) {
            std::size_t col = cur.column();
            std::size_t e = cur.number();
            if (e >= *universe)
              throw ParseError("element " + std::to_string(e) + " out of range", line_no, col);
            t.push_back(static_cast<Element>(e));
            if (cur.peek() == ',') {
              cur.expect(',');
              continue;
            }
            break;
          }
        }
        cur.expect(')');
        if (t.size() != arity)
          cur.fail("arity mismatch for " + rname + ": expected " + std::to_string(arity) + ", got " +
                   std::to_string(t.size()));
        tables[*idx].push_back(std::move(t));
      }
    } else {
      detail::LineCursor(line, line_no).fail("unknown keyword '" + keyword + "'");
    }
    if (end == text.size()) break;
  }
  if (!signature) throw ParseError("missing 'signature' line", line_no, 1);
  if (!universe) throw ParseError("missing 'universe' line", line_no, 1);
  return Structure(std::move(*signature), *universe, std::move(tables), name);
}

}  // namespace bnf
