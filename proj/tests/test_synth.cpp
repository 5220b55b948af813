#include <gtest/gtest.h>

#include "bnf/builders.hpp"
#include "bnf/classify.hpp"
#include "bnf/random.hpp"
#include "bnf/synth.hpp"

using namespace bnf;

namespace {

std::vector<ElementTuple> all_tuples(std::size_t size, std::size_t len) {
  std::vector<ElementTuple> out;
  if (size == 0 && len > 0) return out;
  ElementTuple t(len, 0);
  while (true) {
    out.push_back(t);
    std::size_t q = len;
    bool more = false;
    while (q-- > 0) {
      if (++t[q] < size) {
        more = true;
        break;
      }
      t[q] = 0;
    }
    if (!more) break;
  }
  return out;
}

Structure random_graph(Rng& rng, std::size_t max_size) {
  return random_structure(rng, binary_signature(), uniform_index(rng, max_size + 1), 0.4);
}

}  // namespace

TEST(Distinguish, ClockZeroIsALiteral) {
  Structure edge = parse_structure("signature R/2\nuniverse 2\nrel R: (0,1)\n");
  Formula f = distinguishing_formula(Position(edge, {0, 1}, edge, {1, 0}, 0));
  EXPECT_TRUE(is_quantifier_free(f));
  EXPECT_TRUE(eval_tuple(f, edge, {"x0", "x1"}, {0, 1}));
  EXPECT_FALSE(eval_tuple(f, edge, {"x0", "x1"}, {1, 0}));
}

TEST(Distinguish, ChainsAtClockOne) {
  Structure c2 = build_linear_order(2), c3 = build_linear_order(3);
  Formula f = distinguishing_formula(Position(c2, {}, c3, {}, 1));
  EXPECT_LE(classify(f).pi_rank, 1);
  EXPECT_TRUE(eval(f, c2));
  EXPECT_FALSE(eval(f, c3));
  EXPECT_THROW(distinguishing_formula(Position(c3, {}, c2, {}, 1)), ContractViolation);
}

TEST(Canonical, SinglePointWithoutRelations) {
  Structure point(binary_signature(), 1, {{}});
  CanonicalFormulas cf = canonical_type_formulas(point, {}, 1);
  for (std::size_t n = 0; n <= 3; ++n)
    for (std::size_t code = 0; code < (std::size_t{1} << (n * n)); code += 3) {
      std::vector<ElementTuple> tab;
      for (std::size_t c = 0; c < n * n; ++c)
        if (code >> c & 1) tab.push_back({static_cast<Element>(c / n), static_cast<Element>(c % n)});
      Structure nn(binary_signature(), n, {tab});
      GameSolver solver(point, nn);
      EXPECT_EQ(eval(cf.psi, nn), solver.leq({}, {}, 1));
      EXPECT_EQ(eval(cf.phi, nn), solver.geq({}, {}, 1));
    }
}

TEST(Canonical, ClassesAndAgreement) {
  Rng rng(8);
  for (int k = 0; k < 12; ++k) {
    Structure m = random_graph(rng, 3);
    const std::size_t len = m.size() ? uniform_index(rng, 2) : 0;
    ElementTuple a = random_tuple(rng, m, len);
    for (int n = 1; n <= 2; ++n) {
      CanonicalFormulas cf = canonical_type_formulas(m, a, n);
      EXPECT_EQ(cf.max_tuple_length, m.size() + 1);
      EXPECT_LE(classify(cf.phi).ebar_rank, n);
      EXPECT_LE(classify(cf.psi).a_rank, n);
      for (int j = 0; j < 20; ++j) {
        Structure nn = random_graph(rng, 4);
        if (nn.size() == 0 && len > 0) continue;
        ElementTuple b = random_tuple(rng, nn, len);
        GameSolver solver(m, nn);
        EXPECT_EQ(eval_tuple(cf.psi, nn, var_names(0, len), b), solver.leq(a, b, n));
        EXPECT_EQ(eval_tuple(cf.phi, nn, var_names(0, len), b), solver.geq(a, b, n));
      }
    }
  }
}

TEST(Canonical, Bounds) {
  Structure c2 = build_linear_order(2);
  EXPECT_THROW(canonical_type_formulas(c2, {}, 0), InvalidArgument);
  EXPECT_THROW(canonical_type_formulas(c2, {}, 4), BudgetExceeded);
  EXPECT_THROW(canonical_type_formulas(build_linear_order(6), {}, 3, std::nullopt, 1000), BudgetExceeded);
}

TEST(Sentences, GeqOneMatchesSolver) {
  Rng rng(9);
  Structure u = parse_structure("signature U/1\nuniverse 1\nrel U: (0)\n");
  Formula su = synth_geq1_sentence(u);
  EXPECT_TRUE(eval(su, u));
  EXPECT_FALSE(eval(su, parse_structure("signature U/1\nuniverse 2\nrel U: (0)\n")));
  for (int k = 0; k < 30; ++k) {
    Structure m = random_graph(rng, 3);
    Formula s = synth_geq1_sentence(m);
    EXPECT_LE(classify(s).pi_rank, 1);
    EXPECT_TRUE(eval(s, m));
    for (int j = 0; j < 20; ++j) {
      Structure nn = random_graph(rng, 4);
      EXPECT_EQ(eval(s, nn), GameSolver(m, nn).leq({}, {}, 1));
    }
  }
}

TEST(Sentences, LeqOneMatchesSolver) {
  Structure c3 = build_linear_order(3);
  Formula s = synth_leq1_sentence(c3);
  EXPECT_TRUE(eval(s, c3));
  EXPECT_FALSE(eval(s, build_linear_order(2)));
  EXPECT_TRUE(eval(s, build_linear_order(4)));
  EXPECT_LE(classify(s).ebar_rank, 1);
  Rng rng(10);
  for (int k = 0; k < 30; ++k) {
    Structure m = random_graph(rng, 3);
    Formula f = synth_leq1_sentence(m);
    for (int j = 0; j < 20; ++j) {
      Structure nn = random_graph(rng, 4);
      EXPECT_EQ(eval(f, nn), GameSolver(nn, m).leq({}, {}, 1));
    }
  }
}

TEST(Isolate, BetaZeroIsTheDiagram) {
  Structure c3 = build_linear_order(3);
  EXPECT_EQ(isolate_pi_type(c3, {0, 2}, 0), atomic_diagram(c3, {0, 2}));
}

TEST(Isolate, DefinesTheType) {
  Rng rng(12);
  for (int k = 0; k < 40; ++k) {
    Structure m = random_structure(rng, binary_signature(), 1 + uniform_index(rng, 4), 0.4);
    const std::size_t len = uniform_index(rng, 3);
    ElementTuple a = random_tuple(rng, m, len);
    const int beta = static_cast<int>(uniform_index(rng, 3));
    Formula theta = isolate_pi_type(m, a, beta);
    EXPECT_LE(classify(theta).pi_rank, beta);
    EXPECT_TRUE(eval_tuple(theta, m, var_names(0, len), a));
    GameSolver solver(m, m);
    for (const auto& c : all_tuples(m.size(), len))
      EXPECT_EQ(eval_tuple(theta, m, var_names(0, len), c), solver.leq(a, c, beta));
  }
  EXPECT_THROW(isolate_pi_type(build_linear_order(2), {}, 4), BudgetExceeded);
}

TEST(InternalSigma, SigmaInputIsReturned) {
  Structure c3 = build_linear_order(3);
  Formula f = parse_formula("(exists (y) (rel R x0 y))");
  EXPECT_EQ(internal_sigma(c3, f, 1), f);
}

TEST(InternalSigma, ExistentialOverUniversalCombination) {
  Structure m = parse_structure("signature R/2\nuniverse 3\nrel R: (0,1) (1,1) (1,2) (2,0)\n");
  Formula f = parse_formula(
      "(exists (y) (and (rel R x0 y) (or (forall (z) (rel R y z)) (forall (z) (rel R z y)))))");
  const ComplexityReport r = classify(f);
  ASSERT_EQ(r.e_rank, 2);
  ASSERT_GT(r.sigma_rank, 2);
  Formula theta = internal_sigma(m, f, 2);
  EXPECT_LE(classify(theta).sigma_rank, 2);
  for (Element e = 0; e < 3; ++e) EXPECT_EQ(eval(theta, m, {{"x0", e}}), eval(f, m, {{"x0", e}}));
}

TEST(InternalSigma, RankTooHigh) {
  Formula f = parse_formula("(forall (y) (exists (z) (rel R y z)))");
  EXPECT_THROW(internal_sigma(build_linear_order(2), f, 1), InvalidArgument);
}

TEST(Rename, AvoidsCapture) {
  Formula f = parse_formula("(exists (y) (rel R x y))");
  Formula g = rename_free(f, {{"x", "y"}});
  EXPECT_EQ(free_variables(g), (std::set<std::string>{"y"}));
  Structure c2 = build_linear_order(2);
  EXPECT_EQ(eval(g, c2, {{"y", 0}}), eval(f, c2, {{"x", 0}}));
  EXPECT_EQ(eval(g, c2, {{"y", 1}}), eval(f, c2, {{"x", 1}}));
}
