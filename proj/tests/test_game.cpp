#include <gtest/gtest.h>

#include <thread>

#include "bnf/builders.hpp"
#include "bnf/constructions.hpp"
#include "bnf/game.hpp"
#include "bnf/random.hpp"
#include "bnf/testing/oracle.hpp"
#include "bnf/testing/suites.hpp"

using namespace bnf;

namespace {

Structure chain(std::size_t n) { return build_linear_order(n); }

Structure unary_point(bool value) {
  return parse_structure(std::string("signature P/1\nuniverse 1\n") + (value ? "rel P: (0)\n" : ""));
}

/// Holding and failing positions over a binary relation, sizes ≤ 4.
std::vector<bnf::testing::detail::SampledPosition> sample(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<bnf::testing::detail::SampledPosition> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(bnf::testing::detail::sample_position(rng, 4, 3));
  return out;
}

}  // namespace

TEST(BfLeq, ChainsAtClockOne) {
  Structure c2 = chain(2), c3 = chain(3);
  EXPECT_TRUE(bf_leq(Position(c3, {}, c2, {}, 1)).holds);
  Verdict v = bf_leq(Position(c2, {}, c3, {}, 1));
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(*v.witness, (ElementTuple{0, 1, 2}));
}

TEST(BfLeq, ReflexiveAndClockZero) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Structure m = random_structure(rng, binary_signature(), uniform_index(rng, 5), 0.4);
    Structure n = random_structure(rng, binary_signature(), uniform_index(rng, 5), 0.4);
    ElementTuple a = random_tuple(rng, m, m.size() ? uniform_index(rng, 3) : 0);
    for (int c = 0; c <= 3; ++c) EXPECT_TRUE(bf_leq(Position(m, a, m, a, c)).holds);
    EXPECT_TRUE(bf_leq(Position(m, {}, n, {}, 0)).holds);
  }
}

TEST(BfLeq, WitnessPresentIffFails) {
  for (const auto& p : sample(21, 300)) {
    Verdict v = bf_leq(Position(p.left, p.left_tuple, p.right, p.right_tuple, p.clock));
    if (p.clock == 0)
      EXPECT_FALSE(v.witness.has_value());
    else
      EXPECT_EQ(v.holds, !v.witness.has_value());
  }
}

TEST(BfLeq, RejectsMalformedPositions) {
  Structure c2 = chain(2);
  EXPECT_THROW(bf_leq(Position(c2, {0}, c2, {}, 1)), InvalidArgument);
  EXPECT_THROW(bf_leq(Position(c2, {5}, c2, {0}, 1)), InvalidArgument);
  EXPECT_THROW(bf_leq(Position(c2, {}, chain(2).renamed("x"), {}, -1)), InvalidArgument);
}

TEST(BfGeqEquiv, Chains) {
  Structure c2 = chain(2), c3 = chain(3);
  EXPECT_TRUE(bf_equiv(Position(c3, {}, c3, {}, 2)).holds);
  EquivVerdict e = bf_equiv(Position(c2, {}, c3, {}, 1));
  EXPECT_FALSE(e.holds);
  EXPECT_TRUE(bf_geq(Position(c2, {}, c3, {}, 1)).holds);
  EXPECT_FALSE(bf_geq(Position(c3, {}, c2, {}, 1)).holds);
  EXPECT_TRUE(e.witness.has_value());
}

TEST(BfGeq, FlowerGraphsFollowDomination) {
  Family s({{0}}, 2), t({{0, 1}}, 2);
  Structure gs = build_flower_graph(s, 2), gt = build_flower_graph(t, 2);
  EXPECT_TRUE(dominates(s, t));
  // Finite flower graphs: ≤_2 needs an embedding of the Spoiler side, which fails here.
  EXPECT_FALSE(bf_leq(Position(gs, {}, gt, {}, 2)).holds);
  EXPECT_TRUE(bf_leq(Position(gs, {}, gs, {}, 2)).holds);
}

TEST(BfRank, Examples) {
  Structure c2 = chain(2), c3 = chain(3);
  EXPECT_EQ(bf_rank(c3, c3, 3), 3);
  EXPECT_EQ(bf_rank(c2, c3, 3), 0);
  EXPECT_EQ(bf_rank(unary_point(true), unary_point(false), 3), 0);
}

TEST(BfRank, Monotone) {
  for (const auto& p : sample(8, 100)) {
    const int r = bf_rank(p.left, p.right, 3);
    for (int n = 0; n <= r; ++n) EXPECT_TRUE(bf_equiv(Position(p.left, {}, p.right, {}, n)).holds);
    if (r < 3) { EXPECT_FALSE(bf_equiv(Position(p.left, {}, p.right, {}, r + 1)).holds); }
  }
}

TEST(DuplicatorReply, EmptyAndIdentity) {
  Structure c3 = chain(3);
  EXPECT_EQ(duplicator_reply(Position(c3, {}, c3, {}, 2), {}), ElementTuple{});
  ElementTuple d{2, 0};
  ElementTuple c = duplicator_reply(Position(c3, {}, c3, {}, 2), d);
  GameSolver solver(c3, c3);
  EXPECT_TRUE(solver.geq(c, d, 1));
}

TEST(DuplicatorReply, RepliesVerify) {
  Rng rng(31);
  int checked = 0;
  for (const auto& p : sample(13, 1000)) {
    if (p.clock == 0) continue;
    Position pos(p.left, p.left_tuple, p.right, p.right_tuple, p.clock);
    if (!bf_leq(pos).holds) continue;
    ElementTuple d = random_tuple(rng, p.right, p.right.size() ? uniform_index(rng, p.right.size() + 1) : 0);
    ElementTuple c = duplicator_reply(pos, d);
    ASSERT_EQ(c.size(), d.size());
    ElementTuple a = p.left_tuple, b = p.right_tuple;
    a.insert(a.end(), c.begin(), c.end());
    b.insert(b.end(), d.begin(), d.end());
    EXPECT_TRUE(bf_leq(Position(p.right, b, p.left, a, p.clock - 1)).holds);
    ++checked;
  }
  EXPECT_GE(checked, 200);
}

TEST(DuplicatorReply, ContractViolation) {
  Structure c2 = chain(2), c3 = chain(3);
  EXPECT_THROW(duplicator_reply(Position(c2, {}, c3, {}, 1), {0, 1, 2}), ContractViolation);
}

TEST(SpoilerWitness, Examples) {
  Structure edge = parse_structure("signature R/2\nuniverse 2\nrel R: (0,1)\n");
  Structure none = parse_structure("signature R/2\nuniverse 2\n");
  EXPECT_EQ(spoiler_witness(Position(none, {}, edge, {}, 1)), (ElementTuple{0, 1}));
  EXPECT_THROW(spoiler_witness(Position(edge, {}, edge, {}, 1)), ContractViolation);
}

TEST(SpoilerWitness, EveryReplyFails) {
  int checked = 0;
  for (const auto& p : sample(17, 300)) {
    if (p.clock == 0 || p.left.size() > 3) continue;
    Position pos(p.left, p.left_tuple, p.right, p.right_tuple, p.clock);
    if (bf_leq(pos).holds) continue;
    ElementTuple d = spoiler_witness(pos);
    GameSolver solver(p.right, p.left);
    ElementTuple c(d.size(), 0);
    bool more = p.left.size() > 0 || d.empty();
    while (more) {
      ElementTuple a = p.left_tuple, b = p.right_tuple;
      a.insert(a.end(), c.begin(), c.end());
      b.insert(b.end(), d.begin(), d.end());
      EXPECT_FALSE(solver.leq(b, a, p.clock - 1));
      more = false;
      for (std::size_t q = c.size(); q-- > 0;) {
        if (++c[q] < p.left.size()) {
          more = true;
          break;
        }
        c[q] = 0;
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Solver, MatchesNaiveGame) {
  for (const auto& p : sample(99, 300)) {
    const bool naive = bnf::testing::NaiveGame(p.left, p.right).leq(p.left_tuple, p.right_tuple, p.clock);
    EXPECT_EQ(GameSolver(p.left, p.right).leq(p.left_tuple, p.right_tuple, p.clock), naive)
        << bnf::testing::detail::describe(p);
  }
}

TEST(Solver, OptionsDoNotChangeVerdicts) {
  SolverOptions plain;
  plain.colour_refinement = false;
  plain.witness_budget = 4;
  for (const auto& p : sample(41, 300)) {
    Position pos(p.left, p.left_tuple, p.right, p.right_tuple, p.clock);
    EXPECT_EQ(bf_leq(pos).holds, bf_leq(pos, plain).holds) << bnf::testing::detail::describe(p);
  }
}

TEST(Solver, ConcurrentQueriesAgree) {
  Structure a = build_flower_graph(Family({{0}, {1}}, 2), 2);
  Structure b = build_flower_graph(Family({{0}, {0, 1}}, 2), 2);
  GameSolver shared(a, b);
  std::vector<int> results(8, -1);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i)
    pool.emplace_back([&, i] { results[i] = shared.leq({}, {}, 1 + i % 3); });
  for (auto& t : pool) t.join();
  for (int i = 0; i < 8; ++i) EXPECT_EQ(results[i], GameSolver(a, b).leq({}, {}, 1 + i % 3));
}
