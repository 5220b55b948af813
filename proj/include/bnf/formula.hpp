#pragma once

// Infinitary formulas with finite index sets.
//
// Text format (one formula, whitespace-insensitive):
//   (rel R x y)          atomic, R a relation name or "=" for equality
//   (not f)              negation; pushed to the leaves on parse
//   (and f ...)          conjunction; (and) is true
//   (or f ...)           disjunction; (or) is false
//   (exists (x y) f)     existential block
//   (forall (x) f)       universal block
// Printing always yields negation normal form with `not` only on atoms.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnf/error.hpp"
#include "bnf/structure.hpp"

namespace bnf {

enum class FormulaKind { Atomic, And, Or, Exists, Forall };

/// Name of the built-in equality relation.
inline constexpr std::string_view kEquality = "=";

/// Immutable formula tree in negation normal form.  Subtrees are shared.
class Formula {
 public:
  struct Node {
    FormulaKind kind = FormulaKind::And;
    std::string relation;
    std::vector<std::string> vars;  // atom arguments or quantified block
    bool positive = true;
    std::vector<Formula> children;  // And/Or operands; quantifier body at [0]
  };

  /// The empty conjunction (true).
  Formula() : node_(std::make_shared<Node>()) {}

  static Formula atom(std::string relation, std::vector<std::string> vars, bool positive = true) {
    if (vars.empty()) throw InvalidArgument("atomic formula needs at least one variable");
    for (const auto& v : vars) check_variable(v);
    Node n;
    n.kind = FormulaKind::Atomic;
    n.relation = std::move(relation);
    n.vars = std::move(vars);
    n.positive = positive;
    if (n.relation == kEquality && n.vars.size() != 2) throw InvalidArgument("equality takes two variables");
    return Formula(std::move(n));
  }

  static Formula equal(std::string x, std::string y, bool positive = true) {
    return atom(std::string(kEquality), {std::move(x), std::move(y)}, positive);
  }

  static Formula conj(std::vector<Formula> children) { return junction(FormulaKind::And, std::move(children)); }
  static Formula disj(std::vector<Formula> children) { return junction(FormulaKind::Or, std::move(children)); }
  static Formula truth() { return conj({}); }
  static Formula falsity() { return disj({}); }

  static Formula exists(std::vector<std::string> vars, Formula body) {
    return quantifier(FormulaKind::Exists, std::move(vars), std::move(body));
  }
  static Formula forall(std::vector<std::string> vars, Formula body) {
    return quantifier(FormulaKind::Forall, std::move(vars), std::move(body));
  }

  FormulaKind kind() const noexcept { return node_->kind; }
  const std::string& relation() const noexcept { return node_->relation; }
  const std::vector<std::string>& vars() const noexcept { return node_->vars; }
  bool positive() const noexcept { return node_->positive; }
  const std::vector<Formula>& children() const noexcept { return node_->children; }
  const Formula& body() const { return node_->children.at(0); }
  bool is_quantifier() const noexcept { return kind() == FormulaKind::Exists || kind() == FormulaKind::Forall; }
  bool is_junction() const noexcept { return kind() == FormulaKind::And || kind() == FormulaKind::Or; }
  const Node* node() const noexcept { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.kind == y.kind && x.relation == y.relation && x.vars == y.vars && x.positive == y.positive &&
           x.children == y.children;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  static void check_variable(const std::string& v) {
    if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_'))
      throw InvalidArgument("invalid variable name '" + v + "'");
    for (char c : v)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw InvalidArgument("invalid variable name '" + v + "'");
  }

 private:
  explicit Formula(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  static Formula junction(FormulaKind k, std::vector<Formula> children) {
    Node n;
    n.kind = k;
    n.children = std::move(children);
    return Formula(std::move(n));
  }

  static Formula quantifier(FormulaKind k, std::vector<std::string> vars, Formula body) {
    std::set<std::string> seen;
    for (const auto& v : vars) {
      check_variable(v);
      if (!seen.insert(v).second) throw InvalidArgument("variable '" + v + "' repeated in quantifier block");
    }
    if (vars.empty()) return body;
    Node n;
    n.kind = k;
    n.vars = std::move(vars);
    n.children.push_back(std::move(body));
    return Formula(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

/// Negation normal form of ¬f.
inline Formula negate(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atomic:
      return Formula::atom(f.relation(), f.vars(), !f.positive());
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(negate(c));
      return f.kind() == FormulaKind::And ? Formula::disj(std::move(cs)) : Formula::conj(std::move(cs));
    }
    case FormulaKind::Exists:
      return Formula::forall(f.vars(), negate(f.body()));
    case FormulaKind::Forall:
      return Formula::exists(f.vars(), negate(f.body()));
  }
  return f;
}

namespace detail {

inline void free_vars_into(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case FormulaKind::Atomic:
      for (const auto& v : f.vars())
        if (!bound.count(v)) out.insert(v);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
      for (const auto& c : f.children()) free_vars_into(c, bound, out);
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<std::string> added;
      for (const auto& v : f.vars())
        if (bound.insert(v).second) added.push_back(v);
      free_vars_into(f.body(), bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
  }
}

}  // namespace detail

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  detail::free_vars_into(f, bound, out);
  return out;
}

/// Number of nodes, counting shared subtrees once per occurrence.
inline std::size_t formula_size(const Formula& f) {
  std::size_t n = 1;
  for (const auto& c : f.children()) n += formula_size(c);
  return n;
}

inline bool is_quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  for (const auto& c : f.children())
    if (!is_quantifier_free(c)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Text format

inline void print_formula(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Atomic: {
      if (!f.positive()) out += "(not ";
      out += "(rel ";
      out += f.relation();
      for (const auto& v : f.vars()) {
        out += ' ';
        out += v;
      }
      out += ')';
      if (!f.positive()) out += ')';
      return;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
      out += f.kind() == FormulaKind::And ? "(and" : "(or";
      for (const auto& c : f.children()) {
        out += ' ';
        print_formula(c, out);
      }
      out += ')';
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      out += f.kind() == FormulaKind::Exists ? "(exists (" : "(forall (";
      for (std::size_t i = 0; i < f.vars().size(); ++i) {
        if (i) out += ' ';
        out += f.vars()[i];
      }
      out += ") ";
      print_formula(f.body(), out);
      out += ')';
      return;
    }
  }
}

inline std::string to_string(const Formula& f) {
  std::string out;
  print_formula(f, out);
  return out;
}

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after formula");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';')
      ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string variable() {
    std::size_t at = pos_;
    std::string v = word();
    try {
      Formula::check_variable(v);
    } catch (const InvalidArgument&) {
      pos_ = at;
      skip_ws();
      fail("invalid variable name '" + v + "'");
    }
    return v;
  }

  Formula parse() {
    expect('(');
    std::size_t head_at = pos_;
    std::string head = word();
    if (head == "rel") {
      std::string rel = word();
      std::vector<std::string> vars;
      while (!peek(')')) vars.push_back(variable());
      expect(')');
      if (vars.empty()) fail("atomic formula needs at least one variable");
      if (rel == kEquality && vars.size() != 2) fail("equality takes two variables");
      return Formula::atom(rel, vars);
    }
    if (head == "not") {
      Formula f = parse();
      expect(')');
      return negate(f);
    }
    if (head == "and" || head == "or") {
      std::vector<Formula> cs;
      while (!peek(')')) cs.push_back(parse());
      expect(')');
      return head == "and" ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    if (head == "exists" || head == "forall") {
      expect('(');
      std::vector<std::string> vars;
      std::set<std::string> seen;
      while (!peek(')')) {
        std::string v = variable();
        if (!seen.insert(v).second) fail("variable '" + v + "' repeated in quantifier block");
        vars.push_back(v);
      }
      expect(')');
      Formula body = parse();
      expect(')');
      return head == "exists" ? Formula::exists(std::move(vars), std::move(body))
                              : Formula::forall(std::move(vars), std::move(body));
    }
    pos_ = head_at;
    skip_ws();
    fail("unknown form '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

using Assignment = std::map<std::string, Element>;

namespace detail {

/// Formula with variables resolved to environment slots and relations to indices.
struct CompiledNode {
  FormulaKind kind = FormulaKind::And;
  int relation = -1;  // -1 for equality
  std::vector<int> slots;
  bool positive = true;
  std::vector<CompiledNode> children;
  int max_slot = -1;  // largest slot an atom reads
  // Quantifier over a junction of atoms: atom children of the body that become
  // fully bound after the i-th quantified variable (index 0 = before any).
  std::vector<std::vector<std::size_t>> ready;
};

class Compiler {
 public:
  explicit Compiler(const Structure& m) : m_(m) {}

  CompiledNode compile(const Formula& f, std::map<std::string, int>& scope, int depth) {
    CompiledNode c;
    c.kind = f.kind();
    switch (f.kind()) {
      case FormulaKind::Atomic: {
        c.positive = f.positive();
        if (f.relation() == kEquality) {
          c.relation = -1;
        } else {
          auto r = m_.signature().index_of(f.relation());
          if (!r) throw InvalidArgument("unknown relation '" + f.relation() + "'");
          if (m_.signature()[*r].arity != f.vars().size())
            throw InvalidArgument("relation '" + f.relation() + "' has arity " +
                                  std::to_string(m_.signature()[*r].arity));
          c.relation = static_cast<int>(*r);
        }
        for (const auto& v : f.vars()) {
          auto it = scope.find(v);
          if (it == scope.end()) throw InvalidArgument("unbound variable '" + v + "'");
          c.slots.push_back(it->second);
          c.max_slot = std::max(c.max_slot, it->second);
        }
        return c;
      }
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& ch : f.children()) c.children.push_back(compile(ch, scope, depth));
        return c;
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<std::pair<std::string, std::optional<int>>> saved;
        for (std::size_t i = 0; i < f.vars().size(); ++i) {
          const auto& v = f.vars()[i];
          auto it = scope.find(v);
          saved.emplace_back(v, it == scope.end() ? std::nullopt : std::optional<int>(it->second));
          scope[v] = depth + static_cast<int>(i);
          c.slots.push_back(depth + static_cast<int>(i));
        }
        c.children.push_back(compile(f.body(), scope, depth + static_cast<int>(f.vars().size())));
        for (auto& [v, old] : saved) {
          if (old)
            scope[v] = *old;
          else
            scope.erase(v);
        }
        const CompiledNode& body = c.children[0];
        if (body.kind == FormulaKind::And || body.kind == FormulaKind::Or) {
          c.ready.assign(c.slots.size() + 1, {});
          for (std::size_t j = 0; j < body.children.size(); ++j) {
            const CompiledNode& ch = body.children[j];
            if (ch.kind != FormulaKind::Atomic) continue;
            const int rel = ch.max_slot - depth;  // position of the last quantified slot read
            c.ready[rel < 0 ? 0 : static_cast<std::size_t>(rel) + 1].push_back(j);
          }
        }
        return c;
      }
    }
    return c;
  }

 private:
  const Structure& m_;
};

class Evaluator {
 public:
  explicit Evaluator(const Structure& m) : m_(m) {}

  bool eval(const CompiledNode& c, std::vector<Element>& env) {
    switch (c.kind) {
      case FormulaKind::Atomic:
        return atom(c, env);
      case FormulaKind::And:
        for (const auto& ch : c.children)
          if (!eval(ch, env)) return false;
        return true;
      case FormulaKind::Or:
        for (const auto& ch : c.children)
          if (eval(ch, env)) return true;
        return false;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        return quantify(c, env, 0);
    }
    return false;
  }

 private:
  bool atom(const CompiledNode& c, const std::vector<Element>& env) {
    bool v;
    if (c.relation < 0) {
      v = env[static_cast<std::size_t>(c.slots[0])] == env[static_cast<std::size_t>(c.slots[1])];
    } else {
      buf_.resize(c.slots.size());
      for (std::size_t i = 0; i < c.slots.size(); ++i) buf_[i] = env[static_cast<std::size_t>(c.slots[i])];
      v = m_.holds(static_cast<std::size_t>(c.relation), buf_);
    }
    return v == c.positive;
  }

  // Exists: true iff some assignment satisfies the body.  Forall: dual.
  // With a junction body, atoms that are already decided cut the search:
  // a false conjunct (Exists over And) or a true disjunct (Forall over Or).
  bool quantify(const CompiledNode& c, std::vector<Element>& env, std::size_t i) {
    const bool exists = c.kind == FormulaKind::Exists;
    const CompiledNode& body = c.children[0];
    if (!c.ready.empty()) {
      const bool decisive = body.kind == FormulaKind::Or;
      for (std::size_t j : c.ready[i])
        if (atom(body.children[j], env) == decisive) return decisive;
    }
    if (i == c.slots.size()) return eval(body, env);
    const std::size_t slot = static_cast<std::size_t>(c.slots[i]);
    if (env.size() <= slot) env.resize(slot + 1);
    for (Element e = 0; e < m_.size(); ++e) {
      env[slot] = e;
      const bool v = quantify(c, env, i + 1);
      if (exists && v) return true;
      if (!exists && !v) return false;
    }
    return !exists;
  }

  const Structure& m_;
  std::vector<Element> buf_;
};

}  // namespace detail

/// Compiled formula bound to a structure; reusable across assignments.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Structure& m, const std::vector<std::string>& free_order) : m_(m) {
    std::map<std::string, int> scope;
    for (std::size_t i = 0; i < free_order.size(); ++i) scope[free_order[i]] = static_cast<int>(i);
    arity_ = free_order.size();
    root_ = detail::Compiler(m).compile(f, scope, static_cast<int>(free_order.size()));
  }

  /// Values for the free variables, in the order given at construction.
  bool operator()(const ElementTuple& values) const {
    if (values.size() != arity_) throw InvalidArgument("wrong number of values for free variables");
    for (Element e : values)
      if (e >= m_.size()) throw InvalidArgument("element out of range");
    std::vector<Element> env(values.begin(), values.end());
    detail::Evaluator ev(m_);
    return ev.eval(root_, env);
  }

 private:
  const Structure& m_;
  std::size_t arity_ = 0;
  detail::CompiledNode root_;
};

inline bool eval(const Formula& f, const Structure& m, const Assignment& a = {}) {
  std::vector<std::string> names;
  ElementTuple values;
  for (const auto& [k, v] : a) {
    names.push_back(k);
    values.push_back(v);
  }
  return CompiledFormula(f, m, names)(values);
}

/// Evaluates f with free variables `vars` bound index-wise to `tuple`.
inline bool eval_tuple(const Formula& f, const Structure& m, const std::vector<std::string>& vars,
                       const ElementTuple& tuple) {
  if (vars.size() != tuple.size()) throw InvalidArgument("variable list and tuple differ in length");
  return CompiledFormula(f, m, vars)(tuple);
}

/// Standard names x0, x1, ... for the free variables of tuple formulas.
inline std::string var_name(std::size_t i) { return "x" + std::to_string(i); }

inline std::vector<std::string> var_names(std::size_t from, std::size_t count) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < count; ++i) v.push_back(var_name(from + i));
  return v;
}

}  // namespace bnf
