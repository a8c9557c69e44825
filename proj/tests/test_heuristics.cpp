#include <gtest/gtest.h>

#include <random>

#include "macroplan/macroplan.hpp"
#include "oracles.hpp"

using namespace macroplan;

namespace {

GroundTask propositional(const std::string& actions, const std::string& init, const std::string& goal,
                         const std::string& preds = "(p) (q) (g) (g1) (g2) (x)") {
  Domain d = parse_domain("(define (domain h) (:requirements :strips) (:predicates " + preds + ") " + actions + ")");
  return ground(d, parse_problem("(define (problem h1) (:domain h) (:init " + init + ") (:goal (and " + goal + ")))", d));
}

struct AllH {
  int hmax, hadd, ff;
};

AllH all(const GroundTask& t, const State& s) {
  DeleteRelaxation h(t);
  return {h.hmax(s), h.hadd(s), h.ff(s)};
}

}  // namespace

TEST(Heuristics, GoalStateIsZero) {
  auto t = propositional("(:action a :parameters () :effect (g))", "(g)", "(g)");
  auto h = all(t, t.init);
  EXPECT_EQ(h.hmax, 0);
  EXPECT_EQ(h.hadd, 0);
  EXPECT_EQ(h.ff, 0);
  EXPECT_EQ(DeleteRelaxation(t).blind(t.init), 0);
}

TEST(Heuristics, DeleteFreeChain) {
  auto t = propositional(
      "(:action a :parameters () :effect (p))"
      "(:action b :parameters () :precondition (p) :effect (g))",
      "", "(g)");
  ASSERT_EQ(oracle::h_plus(t, oracle::init_props(t)), 2);
  auto h = all(t, t.init);
  EXPECT_EQ(h.ff, 2);
  EXPECT_EQ(h.hmax, 2);
  EXPECT_EQ(h.hadd, 2);
}

TEST(Heuristics, IndependentGoals) {
  auto t = propositional(
      "(:action a1 :parameters () :effect (g1))"
      "(:action a2 :parameters () :effect (g2))",
      "", "(g1) (g2)");
  auto h = all(t, t.init);
  EXPECT_EQ(h.hmax, 1);
  EXPECT_EQ(h.hadd, 2);
  EXPECT_EQ(h.ff, 2);
}

TEST(Heuristics, SharedAchieverCountedOnce) {
  auto t = propositional(
      "(:action both :parameters () :precondition (p) :effect (and (g1) (g2)))"
      "(:action mk :parameters () :effect (p))",
      "", "(g1) (g2)");
  auto h = all(t, t.init);
  EXPECT_EQ(h.hmax, 2);
  EXPECT_EQ(h.hadd, 4);
  EXPECT_EQ(h.ff, 2);
}

TEST(Heuristics, UnreachableGoalIsInfinite) {
  auto t = propositional("(:action a :parameters () :effect (p))", "", "(g)");
  auto h = all(t, t.init);
  EXPECT_EQ(h.hmax, kInfinity);
  EXPECT_EQ(h.hadd, kInfinity);
  EXPECT_EQ(h.ff, kInfinity);
}

TEST(Heuristics, ParseNames) {
  EXPECT_EQ(parse_heuristic("ff"), HeuristicKind::ff);
  EXPECT_EQ(parse_heuristic("blind"), HeuristicKind::blind);
  EXPECT_FALSE(parse_heuristic("lama"));
}

// hmax <= h+ <= h_FF and hmax <= hadd on random tasks, with h+ computed
// exhaustively.
TEST(Heuristics, BoundsAgainstOptimalRelaxedPlan) {
  std::mt19937 rng(3);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto g = gen::random_propositional(seed, 7, 8, 5);
    Domain d = parse_domain(g.domain);
    GroundTask t = ground(d, parse_problem(g.problem, d));
    DeleteRelaxation h(t);
    for (const State& s : oracle::sample_states(t, rng, 10, 6)) {
      auto plus = oracle::h_plus(t, s.props());
      int hm = h.hmax(s), ha = h.hadd(s), hf = h.ff(s);
      if (!plus) {
        EXPECT_EQ(hm, kInfinity);
        EXPECT_EQ(ha, kInfinity);
        EXPECT_EQ(hf, kInfinity);
        continue;
      }
      EXPECT_LE(hm, *plus);
      EXPECT_GE(hf, *plus);
      EXPECT_LE(hm, ha);
      EXPECT_EQ(hm == 0, t.is_goal(s));
      EXPECT_EQ(hf == 0, t.is_goal(s));
      EXPECT_EQ(ha == 0, t.is_goal(s));
    }
  }
}
