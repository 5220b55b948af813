#include <gtest/gtest.h>

#include "bnf/builders.hpp"
#include "bnf/constructions.hpp"
#include "bnf/random.hpp"

using namespace bnf;

namespace {

Family random_family(Rng& rng, std::size_t u) {
  std::set<FamilyMember> sets;
  const std::size_t count = 1 + uniform_index(rng, 3);
  for (std::size_t i = 0; i < count; ++i) {
    FamilyMember m;
    for (Element e = 0; e < u; ++e)
      if (coin(rng, 0.5)) m.push_back(e);
    sets.insert(m);
  }
  return Family(sets, u);
}

Structure graph(const std::string& rows, std::size_t size) {
  return parse_structure("signature R/2\nuniverse " + std::to_string(size) + "\n" + (rows.empty() ? "" : "rel R: " + rows + "\n"));
}

}  // namespace

TEST(Dominates, Examples) {
  EXPECT_TRUE(dominates(Family({{0}}, 2), Family({{0, 1}}, 2)));
  EXPECT_FALSE(dominates(Family({{0, 1}}, 3), Family({{2}}, 3)));
}

TEST(Dominates, Preorder) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    Family s = random_family(rng, 3), t = random_family(rng, 3), r = random_family(rng, 3);
    EXPECT_TRUE(dominates(s, s));
    if (dominates(s, t) && dominates(t, r)) { EXPECT_TRUE(dominates(s, r)); }
  }
}

TEST(Closure, MonotoneAndIdempotent) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Family s = random_family(rng, 3);
    Family c = close_family(s);
    EXPECT_TRUE(is_closed(c));
    for (const auto& m : s.sets()) EXPECT_TRUE(c.sets().count(m));
  }
}

TEST(SubsetLeq2, IdenticalFamiliesAgree) {
  Family s = close_family(Family({{0}}, 2));
  SubsetLeq2Report rep = verify_claim_subsetleq2(s, s, {1, 2, 3});
  EXPECT_TRUE(rep.dominates);
  for (bool v : rep.verdicts) EXPECT_TRUE(v);
  EXPECT_TRUE(rep.agrees);
}

TEST(SubsetLeq2, NonDominatingFamilies) {
  SubsetLeq2Report rep =
      verify_claim_subsetleq2(close_family(Family({{0}}, 2)), close_family(Family({{1}}, 2)), {1, 2, 3});
  EXPECT_FALSE(rep.dominates);
  ASSERT_TRUE(rep.stabilized_verdict);
  EXPECT_FALSE(*rep.stabilized_verdict);
  EXPECT_TRUE(rep.agrees);
}

TEST(SubsetLeq2, DominatingFamiliesAgreeAtStabilization) {
  SubsetLeq2Report rep =
      verify_claim_subsetleq2(close_family(Family({{}}, 2)), close_family(Family({{0}}, 2)), {1, 2, 3});
  EXPECT_TRUE(rep.dominates);
  ASSERT_TRUE(rep.stabilized_verdict);
  EXPECT_TRUE(*rep.stabilized_verdict);
  EXPECT_TRUE(rep.agrees);
}

TEST(SubsetLeq2, RequiresClosedFamilies) {
  EXPECT_THROW(verify_claim_subsetleq2(Family({{0}}, 2), Family({{0}}, 2), {1}), InvalidArgument);
  Family big = close_family(Family({{}}, 5));
  EXPECT_THROW(verify_claim_subsetleq2(big, big, {20}), BudgetExceeded);
}

TEST(Geq3, IdenticalFamilies) {
  Family s = close_family(Family({{0}}, 2));
  Geq3Report rep = verify_claim_geq3(s, s, 2);
  EXPECT_TRUE(rep.hypothesis_ok);
  ASSERT_TRUE(rep.verdict);
  EXPECT_TRUE(*rep.verdict);
}

TEST(Geq3, HypothesisChecked) {
  Geq3Report bad = verify_claim_geq3(Family({{0}}, 2), Family({{1}}, 2), 1);
  EXPECT_FALSE(bad.hypothesis_ok);
  EXPECT_FALSE(bad.hypothesis_error.empty());
  EXPECT_FALSE(bad.verdict.has_value());
  Geq3Report ok = verify_claim_geq3(close_family(Family({{}}, 1)), close_family(Family({{}, {0}}, 1)), 2);
  EXPECT_TRUE(ok.hypothesis_ok);
  EXPECT_TRUE(ok.verdict.has_value());
}

TEST(UnionCriteria, IdenticalSpecs) {
  ComponentSpec spec{{{graph("(0,1)", 2), 3}, {graph("(0,0)", 1), 3}}};
  UnionCriteriaReport rep = check_union_criteria(spec, {}, spec, {}, 2);
  EXPECT_TRUE(rep.cond_a && rep.cond_b && rep.cond_c && rep.cond_d);
  EXPECT_TRUE(rep.conclusion_checked);
  ASSERT_TRUE(rep.conclusion);
  EXPECT_TRUE(*rep.conclusion);
  EXPECT_EQ(rep.multiplicities_a, (std::vector<std::size_t>{3, 3}));
}

TEST(UnionCriteria, UndominatedComponentFailsD) {
  ComponentSpec a{{{graph("", 1), 3}}};
  ComponentSpec b{{{graph("", 1), 3}, {graph("(0,0)", 1), 3}}};
  UnionCriteriaReport rep = check_union_criteria(a, {}, b, {}, 2);
  EXPECT_FALSE(rep.cond_d);
  ASSERT_TRUE(rep.counterexample_d);
  EXPECT_EQ(*rep.counterexample_d, 1u);
  EXPECT_FALSE(rep.conclusion_checked);
}

TEST(UnionCriteria, TupleEquivalencePattern) {
  ComponentSpec spec{{{graph("(0,1)", 2), 2}}};
  // elements 0,1 share a copy; 2,3 are the second copy
  UnionCriteriaReport rep = check_union_criteria(spec, {0, 1}, spec, {0, 2}, 2);
  EXPECT_FALSE(rep.cond_a);
  ASSERT_TRUE(rep.counterexample_a);
}

TEST(UnionCriteria, SignatureMismatch) {
  ComponentSpec a{{{graph("", 1), 1}}};
  ComponentSpec b{{{build_linear_order(1, "S"), 1}}};
  EXPECT_THROW(check_union_criteria(a, {}, b, {}, 2), InvalidArgument);
}

TEST(UnionRefutation, NoWitnessWhenDominated) {
  ComponentSpec spec{{{graph("(0,1)", 2), 3}}};
  UnionRefutationReport rep = check_union_refutation(spec, spec, 2);
  EXPECT_FALSE(rep.asserted);
  EXPECT_FALSE(rep.witness_part);
}

TEST(UnionRefutation, NewPatternIsRefuted) {
  ComponentSpec a{{{graph("(0,1)", 2), 3}}};
  ComponentSpec b{{{graph("(0,1)", 2), 3}, {graph("(0,0)", 1), 3}}};
  UnionRefutationReport rep = check_union_refutation(a, b, 2);
  EXPECT_TRUE(rep.asserted);
  ASSERT_TRUE(rep.witness_part);
  EXPECT_EQ(*rep.witness_part, 1u);
  EXPECT_TRUE(rep.verified);
}

TEST(IntervalFactoring, Examples) {
  Structure c5 = build_linear_order(5);
  IntervalFactoringReport same = interval_factoring_check(c5, {1, 3}, c5, {1, 3}, 3);
  EXPECT_TRUE(same.direct);
  EXPECT_TRUE(same.factored);
  EXPECT_EQ(same.segments.size(), 3u);

  IntervalFactoringReport empty = interval_factoring_check(build_linear_order(3), {}, build_linear_order(4), {}, 2);
  EXPECT_TRUE(empty.agree);
  EXPECT_EQ(empty.segments.size(), 1u);
}

TEST(IntervalFactoring, SegmentsPartitionTheOrder) {
  Structure c6 = build_linear_order(6);
  IntervalFactoringReport rep = interval_factoring_check(c6, {1, 4}, build_linear_order(4), {0, 3}, 1);
  ASSERT_EQ(rep.segments.size(), 3u);
  EXPECT_EQ(rep.segments[0].a_elements, (std::vector<Element>{0}));
  EXPECT_EQ(rep.segments[1].a_elements, (std::vector<Element>{2, 3}));
  EXPECT_EQ(rep.segments[2].a_elements, (std::vector<Element>{5}));
  EXPECT_TRUE(rep.segments[0].b_elements.empty());
  EXPECT_EQ(rep.segments[1].b_elements, (std::vector<Element>{1, 2}));
}

TEST(IntervalFactoring, Errors) {
  Structure c3 = build_linear_order(3);
  EXPECT_THROW(interval_factoring_check(c3, {2, 1}, c3, {0, 1}, 1), InvalidArgument);
  EXPECT_THROW(interval_factoring_check(c3, {0}, c3, {0, 1}, 1), InvalidArgument);
  Structure cyc = graph("(0,1) (1,2) (2,0)", 3);
  EXPECT_THROW(interval_factoring_check(cyc, {}, c3, {}, 1), InvalidArgument);
}
