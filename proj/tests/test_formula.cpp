#include <gtest/gtest.h>

#include "bnf/classify.hpp"
#include "bnf/formula.hpp"
#include "bnf/random.hpp"
#include "bnf/testing/oracle.hpp"

using namespace bnf;

namespace {

Structure unary(std::size_t size, std::vector<Element> marked) {
  std::vector<ElementTuple> rows;
  for (auto e : marked) rows.push_back({e});
  return Structure(Signature({{"U", 1}}), size, {rows});
}

FormulaGrammar grammar(std::size_t free_count) {
  FormulaGrammar g;
  g.signature = Signature({{"R", 2}, {"U", 1}});
  g.free_vars = var_names(0, free_count);
  return g;
}

std::vector<Assignment> all_assignments(const Structure& m, const std::vector<std::string>& vars) {
  std::vector<Assignment> out;
  ElementTuple t(vars.size(), 0);
  if (m.size() == 0 && !vars.empty()) return out;
  while (true) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = t[i];
    out.push_back(a);
    std::size_t q = t.size();
    bool more = false;
    while (q-- > 0) {
      if (++t[q] < m.size()) {
        more = true;
        break;
      }
      t[q] = 0;
    }
    if (!more) break;
  }
  return out;
}

}  // namespace

TEST(Eval, Atoms) {
  Structure m = unary(2, {1});
  EXPECT_TRUE(eval(Formula::atom("U", {"x"}), m, {{"x", 1}}));
  EXPECT_FALSE(eval(Formula::atom("U", {"x"}), m, {{"x", 0}}));
  EXPECT_TRUE(eval(Formula::atom("U", {"x"}, false), m, {{"x", 0}}));
  EXPECT_TRUE(eval(Formula::equal("x", "y"), m, {{"x", 1}, {"y", 1}}));
  EXPECT_TRUE(eval(Formula::equal("x", "y", false), m, {{"x", 0}, {"y", 1}}));
}

TEST(Eval, EmptyUniverse) {
  Structure empty = unary(0, {});
  EXPECT_TRUE(eval(Formula::forall({"x"}, Formula::atom("U", {"x"})), empty));
  EXPECT_FALSE(eval(Formula::exists({"x"}, Formula::atom("U", {"x"}, false)), empty));
}

TEST(Eval, EmptyJunctions) {
  Structure m = unary(1, {});
  EXPECT_TRUE(eval(Formula::truth(), m));
  EXPECT_FALSE(eval(Formula::falsity(), m));
}

TEST(Eval, Errors) {
  Structure m = unary(2, {1});
  EXPECT_THROW(eval(Formula::atom("U", {"x"}), m), InvalidArgument);
  EXPECT_THROW(eval(Formula::atom("Q", {"x"}), m, {{"x", 0}}), InvalidArgument);
  EXPECT_THROW(eval(Formula::atom("U", {"x", "y"}), m, {{"x", 0}, {"y", 0}}), InvalidArgument);
}

TEST(Eval, MatchesReferenceEvaluator) {
  Rng rng(2);
  const auto g = grammar(2);
  for (int i = 0; i < 1000; ++i) {
    Structure m = random_structure(rng, g.signature, 1 + uniform_index(rng, 3), 0.4);
    Formula f = draw_formula(rng, g, 1 + static_cast<int>(uniform_index(rng, 4)));
    Assignment a{{"x0", static_cast<Element>(uniform_index(rng, m.size()))},
                 {"x1", static_cast<Element>(uniform_index(rng, m.size()))}};
    ASSERT_EQ(eval(f, m, a), bnf::testing::reference_eval(f, m, a)) << to_string(f);
  }
}

TEST(Eval, EvalTupleUsesVariableOrder) {
  Structure m(Signature({{"R", 2}}), 2, {{{0, 1}}});
  Formula f = Formula::atom("R", {"x0", "x1"});
  EXPECT_TRUE(eval_tuple(f, m, {"x0", "x1"}, {0, 1}));
  EXPECT_FALSE(eval_tuple(f, m, {"x1", "x0"}, {0, 1}));
  EXPECT_THROW(eval_tuple(f, m, {"x0"}, {0, 1}), InvalidArgument);
}

TEST(Negate, Literals) {
  Formula a = Formula::atom("R", {"x", "y"});
  Formula n = negate(a);
  EXPECT_EQ(n.kind(), FormulaKind::Atomic);
  EXPECT_FALSE(n.positive());
  EXPECT_EQ(negate(Formula::truth()), Formula::falsity());
}

TEST(Negate, InvolutionAndSemantics) {
  Rng rng(4);
  const auto g = grammar(2);
  for (int i = 0; i < 300; ++i) {
    Formula f = draw_formula(rng, g, 4);
    EXPECT_EQ(negate(negate(f)), f);
    Structure m = random_structure(rng, g.signature, 1 + uniform_index(rng, 3), 0.4);
    for (const auto& a : all_assignments(m, g.free_vars)) EXPECT_NE(eval(negate(f), m, a), eval(f, m, a));
  }
}

TEST(Text, ParsePrintRoundTrip) {
  Formula f = parse_formula("(forall (x y) (or (rel R x y) (not (rel R y x)) (exists (z) (and (rel = x z) (rel U z)))))");
  EXPECT_EQ(f.kind(), FormulaKind::Forall);
  EXPECT_EQ(parse_formula(to_string(f)), f);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Formula g = draw_formula(rng, grammar(2), 5);
    EXPECT_EQ(parse_formula(to_string(g)), g);
  }
}

TEST(Text, NotIsPushedDown) {
  Formula f = parse_formula("(not (exists (x) (and (rel U x) (rel = x x))))");
  EXPECT_EQ(f, parse_formula("(forall (x) (or (not (rel U x)) (not (rel = x x))))"));
}

TEST(Text, ParseErrors) {
  EXPECT_THROW(parse_formula("(rel R x"), ParseError);
  EXPECT_THROW(parse_formula("(frob x)"), ParseError);
  EXPECT_THROW(parse_formula("(exists () )"), ParseError);
  EXPECT_THROW(parse_formula("(rel R x) extra"), ParseError);
}

TEST(FreeVariables, RespectsBinding) {
  Formula f = parse_formula("(and (rel R x y) (exists (y) (rel R y z)))");
  EXPECT_EQ(free_variables(f), (std::set<std::string>{"x", "y", "z"}));
  EXPECT_TRUE(is_quantifier_free(parse_formula("(or (rel R x y) (rel = x y))")));
}

TEST(RandomFormula, DeterministicAndInClass) {
  const auto g = grammar(1);
  Formula a = random_formula(77, g, FormulaClass::Pi, 2);
  Formula b = random_formula(77, g, FormulaClass::Pi, 2);
  EXPECT_EQ(a, b);
  EXPECT_LE(classify(a).pi_rank, 2);
}

TEST(RandomFormula, CoversAllClasses) {
  FormulaGrammar g = grammar(1);
  g.max_depth = 6;
  Rng rng(12);
  std::set<std::pair<int, int>> hit;
  const std::vector<FormulaClass> classes{FormulaClass::Sigma, FormulaClass::Pi,   FormulaClass::E,
                                          FormulaClass::A,     FormulaClass::EBar, FormulaClass::ABar};
  for (int i = 0; i < 10000 && hit.size() < 18; ++i) {
    const ComplexityReport r = classify(draw_formula(rng, g, 1 + static_cast<int>(uniform_index(rng, 6))));
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const int k = rank_of(r, classes[c]);
      if (k >= 1 && k <= 3) hit.insert({static_cast<int>(c), k});
    }
  }
  EXPECT_EQ(hit.size(), 18u);
}

TEST(RandomFormula, UnreachableClassThrows) {
  FormulaGrammar g = grammar(1);
  g.max_depth = 3;
  EXPECT_THROW(random_formula(1, g, FormulaClass::E, 0, 500), InvalidArgument);
  EXPECT_NO_THROW(random_formula(1, g, FormulaClass::Sigma, 0, 500));
}
