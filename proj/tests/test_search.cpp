#include <gtest/gtest.h>

#include <string>

#include "macroplan/macroplan.hpp"
#include "oracles.hpp"

using namespace macroplan;

namespace {

std::string fixture(const std::string& rel) { return read_text_file(std::string(FIXTURE_DIR) + "/" + rel); }

GroundTask ferry_fixture(const std::string& name) {
  Domain d = parse_domain(fixture("ferry/domain.pddl"));
  return ground(d, parse_problem(fixture("ferry/" + name), d));
}

GroundTask generated(const gen::GeneratedTask& g) {
  Domain d = parse_domain(g.domain);
  return ground(d, parse_problem(g.problem, d));
}

MacroAction macro_of(const GroundTask& t, const std::vector<std::string>& ids) {
  MacroAction m;
  for (const auto& id : ids) {
    const GroundAction* a = t.find_action(id);
    EXPECT_NE(a, nullptr) << id;
    m.actions.push_back(a);
    m.ids.push_back(a->id);
    m.cost += a->cost;
  }
  return m;
}

SearchConfig with(HeuristicKind h, const MacroLibrary* lib = nullptr) {
  SearchConfig c;
  c.heuristic = h;
  c.timeout_s = 60;
  c.macro_library = lib;
  return c;
}

}  // namespace

TEST(AStar, GoalInInitGivesEmptyPlanWithoutExpansion) {
  auto t = ferry_fixture("p-goal-in-init.pddl");
  auto r = astar(t, with(HeuristicKind::ff));
  ASSERT_EQ(r.status, SearchStatus::solved);
  EXPECT_TRUE(r.plan->steps.empty());
  EXPECT_EQ(r.expanded, 0u);
  EXPECT_EQ(r.generated, 1u);
}

TEST(AStar, LinearFerryIsOptimalUnderAdmissibleHeuristics) {
  auto t = ferry_fixture("p-3loc-linear.pddl");
  auto optimal = oracle::bfs_optimal_cost(t);
  ASSERT_TRUE(optimal);
  EXPECT_EQ(*optimal, 8);
  for (auto h : {HeuristicKind::blind, HeuristicKind::hmax}) {
    auto r = astar(t, with(h));
    ASSERT_EQ(r.status, SearchStatus::solved);
    EXPECT_EQ(r.plan->cost, *optimal) << to_string(h);
    EXPECT_TRUE(validate_plan(t, *r.plan));
  }
  for (auto h : {HeuristicKind::ff, HeuristicKind::hadd}) {
    auto r = astar(t, with(h));
    ASSERT_EQ(r.status, SearchStatus::solved);
    EXPECT_TRUE(validate_plan(t, *r.plan));
  }
}

TEST(AStar, UnreachableGoal) {
  auto t = ferry_fixture("p-unsolvable.pddl");
  for (auto h : {HeuristicKind::blind, HeuristicKind::ff}) {
    auto r = astar(t, with(h));
    EXPECT_EQ(r.status, SearchStatus::unsolvable);
    EXPECT_FALSE(r.plan);
  }
  // blind search must exhaust the reachable states: board and debark only.
  EXPECT_GT(astar(t, with(HeuristicKind::blind)).expanded, 0u);
}

TEST(AStar, OptimalOnGeneratedInstances) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    for (const auto& g : {gen::ferry(3, 2, s), gen::gripper(2, 2, s)}) {
      auto t = generated(g);
      auto optimal = oracle::bfs_optimal_cost(t);
      ASSERT_TRUE(optimal) << g.name;
      for (auto h : {HeuristicKind::blind, HeuristicKind::hmax}) {
        auto r = astar(t, with(h));
        ASSERT_EQ(r.status, SearchStatus::solved) << g.name;
        EXPECT_EQ(r.plan->cost, *optimal) << g.name << " " << to_string(h);
      }
    }
  }
}

TEST(AStar, BudgetsAreReportedAsStatus) {
  auto t = generated(gen::ferry(4, 4, 11));
  SearchConfig c = with(HeuristicKind::blind);
  c.node_budget = 5;
  EXPECT_EQ(astar(t, c).status, SearchStatus::memory_out);
  c.node_budget.reset();
  c.timeout_s = 1e-9;
  auto r = astar(t, c);
  EXPECT_EQ(r.status, SearchStatus::timeout);
  EXPECT_FALSE(r.plan);
  c.timeout_s = 0;
  EXPECT_THROW(astar(t, c), std::invalid_argument);
}

TEST(AStar, ModeChecks) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  MacroLibrary lib;
  EXPECT_THROW(astar(t, with(HeuristicKind::ff, &lib)), std::invalid_argument);
  EXPECT_THROW(search_with_macros(t, with(HeuristicKind::ff)), std::invalid_argument);
}

TEST(ApplyMacro, FirstActionInapplicable) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  auto m = macro_of(t, {"(debark car1 port2)", "(board car1 port2)"});
  EXPECT_FALSE(apply_macro(t.init, m));
}

TEST(ApplyMacro, InversePairIsNetNoOp) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  auto m = macro_of(t, {"(board car1 port1)", "(debark car1 port1)"});
  auto r = apply_macro(t.init, m);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, t.init);
}

TEST(ApplyMacro, ChainMatchesManualApplication) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  auto m = macro_of(t, {"(board car1 port1)", "(sail port1 port2)"});
  auto r = apply_macro(t.init, m);
  ASSERT_TRUE(r);
  State manual = apply(apply(t.init, *t.find_action("(board car1 port1)")), *t.find_action("(sail port1 port2)"));
  EXPECT_EQ(*r, manual);
  // second step fails when the ferry is elsewhere
  auto bad = macro_of(t, {"(board car1 port1)", "(sail port2 port1)"});
  EXPECT_FALSE(apply_macro(t.init, bad));
}

TEST(SearchWithMacros, EmptyLibraryMatchesAStar) {
  std::vector<GroundTask> tasks;
  for (const char* f : {"p-2loc-1car.pddl", "p-3loc-linear.pddl", "p-goal-in-init.pddl", "p-unsolvable.pddl"})
    tasks.push_back(ferry_fixture(f));
  tasks.push_back(generated(gen::gripper(3, 3, 4)));
  MacroLibrary empty;
  for (const auto& t : tasks) {
    for (auto h : {HeuristicKind::ff, HeuristicKind::hadd, HeuristicKind::hmax, HeuristicKind::blind}) {
      auto a = astar(t, with(h));
      auto b = search_with_macros(t, with(h, &empty));
      EXPECT_EQ(a.status, b.status);
      EXPECT_EQ(a.plan, b.plan);
      EXPECT_EQ(a.expanded, b.expanded);
      EXPECT_EQ(a.generated, b.generated);
      EXPECT_EQ(b.macro_applications, 0u);
    }
  }
}

TEST(SearchWithMacros, MacroSuccessorJumpsToGoal) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  MacroLibrary lib;
  lib.macros.push_back(macro_of(t, {"(board car1 port1)", "(sail port1 port2)", "(debark car1 port2)"}));
  // h_FF(init) = 3, so the macro successor (g 3, h 0) ties on f with the
  // primitives and wins on larger g.
  auto r = search_with_macros(t, with(HeuristicKind::ff, &lib));
  ASSERT_EQ(r.status, SearchStatus::solved);
  EXPECT_EQ(r.expanded, 1u);
  EXPECT_EQ(r.plan->cost, 3);
  EXPECT_EQ(r.macro_steps, 1u);
  EXPECT_TRUE(validate_plan(t, *r.plan));
  // one macro successor plus the primitives board and sail
  EXPECT_EQ(r.macro_applications, 1u);
  EXPECT_EQ(r.generated, 1u + 1u + 2u);
}

TEST(SearchWithMacros, FerryMacroDoesNotIncreaseExpansions) {
  auto t = ferry_fixture("p-3loc-linear.pddl");
  MacroLibrary lib;
  lib.macros.push_back(macro_of(t, {"(sail l2 l3)", "(debark c1 l3)"}));
  for (auto h : {HeuristicKind::ff, HeuristicKind::blind}) {
    auto base = astar(t, with(h));
    auto mac = search_with_macros(t, with(h, &lib));
    ASSERT_EQ(mac.status, SearchStatus::solved);
    EXPECT_TRUE(validate_plan(t, *mac.plan));
    RecordProperty(std::string("baseline_expanded_") + std::string(to_string(h)), static_cast<int>(base.expanded));
    RecordProperty(std::string("macro_expanded_") + std::string(to_string(h)), static_cast<int>(mac.expanded));
    EXPECT_LE(mac.expanded, base.expanded) << to_string(h);
  }
}

TEST(SearchWithMacros, IntermediateRecordingStillValid) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto t = generated(gen::ferry(3, 3, s));
    auto base = astar(t, with(HeuristicKind::ff));
    ASSERT_TRUE(base.plan);
    if (base.plan->steps.size() < 2) continue;
    MacroLibrary lib;
    lib.macros.push_back(macro_of(t, {base.plan->steps[0], base.plan->steps[1]}));
    SearchConfig c = with(HeuristicKind::ff, &lib);
    c.record_macro_intermediates = true;
    auto r = search_with_macros(t, c);
    ASSERT_EQ(r.status, SearchStatus::solved);
    EXPECT_TRUE(validate_plan(t, *r.plan));
  }
}

TEST(RunRecord, JsonFields) {
  auto t = ferry_fixture("p-2loc-1car.pddl");
  auto r = astar(t, with(HeuristicKind::ff));
  auto j = run_record_json(r, HeuristicKind::ff, 0.1);
  for (const char* k : {"status", "plan_length", "cost", "expanded", "generated", "macro_applications",
                        "wall_time_s", "heuristic", "support_used"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["status"], "solved");
  EXPECT_EQ(j["cost"], 3);
  EXPECT_EQ(j["heuristic"], "ff");
}
