#pragma once

// Small problem generators in the style of the IPC generators. Object names
// are reused across instances (l0, l1, ..., c0, c1, ...), so ground action
// identities learned on one instance can be matched in another.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace macroplan::gen {

inline constexpr const char* kFerryDomain = R"((define (domain ferry)
  (:requirements :strips :typing)
  (:types car location)
  (:predicates (not-eq ?x - location ?y - location)
               (at-ferry ?l - location)
               (at ?c - car ?l - location)
               (empty-ferry)
               (on ?c - car))
  (:action sail
    :parameters (?from - location ?to - location)
    :precondition (and (not-eq ?from ?to) (at-ferry ?from))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?car - car ?loc - location)
    :precondition (and (at ?car ?loc) (at-ferry ?loc) (empty-ferry))
    :effect (and (on ?car) (not (at ?car ?loc)) (not (empty-ferry))))
  (:action debark
    :parameters (?car - car ?loc - location)
    :precondition (and (on ?car) (at-ferry ?loc))
    :effect (and (at ?car ?loc) (empty-ferry) (not (on ?car)))))
)";

inline constexpr const char* kGripperDomain = R"((define (domain gripper)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room)
               (at ?b - ball ?r - room)
               (free ?g - gripper)
               (carry ?o - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj - ball ?room - room ?gripper - gripper)
    :precondition (and (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
)";

struct GeneratedTask {
  std::string name;
  std::string domain;
  std::string problem;
};

inline GeneratedTask ferry(std::size_t locations, std::size_t cars, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> loc(0, locations - 1);
  std::ostringstream os;
  std::string name = "ferry-l" + std::to_string(locations) + "-c" + std::to_string(cars) + "-s" + std::to_string(seed);
  os << "(define (problem " << name << ")\n  (:domain ferry)\n  (:objects";
  for (std::size_t i = 0; i < locations; ++i) os << " l" << i;
  os << " - location";
  for (std::size_t i = 0; i < cars; ++i) os << " c" << i;
  os << " - car)\n  (:init";
  for (std::size_t i = 0; i < locations; ++i)
    for (std::size_t j = 0; j < locations; ++j)
      if (i != j) os << " (not-eq l" << i << " l" << j << ")";
  os << "\n    (empty-ferry) (at-ferry l" << loc(rng) << ")";
  std::vector<std::size_t> start(cars);
  for (std::size_t c = 0; c < cars; ++c) {
    start[c] = loc(rng);
    os << " (at c" << c << " l" << start[c] << ")";
  }
  os << ")\n  (:goal (and";
  for (std::size_t c = 0; c < cars; ++c) os << " (at c" << c << " l" << loc(rng) << ")";
  os << ")))\n";
  return {name, kFerryDomain, os.str()};
}

inline GeneratedTask gripper(std::size_t rooms, std::size_t balls, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> room(0, rooms - 1);
  std::ostringstream os;
  std::string name = "gripper-r" + std::to_string(rooms) + "-b" + std::to_string(balls) + "-s" + std::to_string(seed);
  os << "(define (problem " << name << ")\n  (:domain gripper)\n  (:objects";
  for (std::size_t i = 0; i < rooms; ++i) os << " r" << i;
  os << " - room";
  for (std::size_t i = 0; i < balls; ++i) os << " b" << i;
  os << " - ball left right - gripper)\n  (:init (free left) (free right) (at-robby r" << room(rng) << ")";
  for (std::size_t b = 0; b < balls; ++b) os << " (at b" << b << " r" << room(rng) << ")";
  os << ")\n  (:goal (and";
  for (std::size_t b = 0; b < balls; ++b) os << " (at b" << b << " r" << room(rng) << ")";
  os << ")))\n";
  return {name, kGripperDomain, os.str()};
}

// Random propositional STRIPS task over 0-ary predicates. The goal is a
// subset of a state reached by a random walk from init, so the task is
// always solvable.
inline GeneratedTask random_propositional(std::uint64_t seed, std::size_t num_props = 8, std::size_t num_actions = 10,
                                          std::size_t walk_length = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> prop(0, num_props - 1);
  std::bernoulli_distribution coin(0.5);

  struct Act {
    std::set<std::size_t> pre, add, del;
  };
  std::vector<Act> acts(num_actions);
  for (auto& a : acts) {
    std::size_t npre = rng() % 3, nadd = 1 + rng() % 2, ndel = rng() % 3;
    for (std::size_t i = 0; i < npre; ++i) a.pre.insert(prop(rng));
    for (std::size_t i = 0; i < nadd; ++i) a.add.insert(prop(rng));
    for (std::size_t i = 0; i < ndel; ++i) {
      auto p = prop(rng);
      if (!a.add.contains(p)) a.del.insert(p);
    }
  }
  std::set<std::size_t> init;
  for (std::size_t p = 0; p < num_props; ++p)
    if (coin(rng)) init.insert(p);

  std::set<std::size_t> cur = init;
  for (std::size_t step = 0; step < walk_length; ++step) {
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < acts.size(); ++i)
      if (std::includes(cur.begin(), cur.end(), acts[i].pre.begin(), acts[i].pre.end())) ok.push_back(i);
    if (ok.empty()) break;
    const auto& a = acts[ok[rng() % ok.size()]];
    for (auto p : a.del) cur.erase(p);
    for (auto p : a.add) cur.insert(p);
  }
  std::set<std::size_t> goal;
  for (auto p : cur)
    if (coin(rng)) goal.insert(p);
  if (goal.empty() && !cur.empty()) goal.insert(*cur.begin());

  auto atoms = [](const std::set<std::size_t>& s) {
    std::string out;
    for (auto p : s) out += " (p" + std::to_string(p) + ")";
    return out;
  };

  std::ostringstream d;
  d << "(define (domain rnd)\n  (:requirements :strips)\n  (:predicates";
  for (std::size_t p = 0; p < num_props; ++p) d << " (p" << p << ")";
  d << ")\n";
  for (std::size_t i = 0; i < acts.size(); ++i) {
    d << "  (:action a" << i << " :parameters () :precondition (and" << atoms(acts[i].pre) << ")\n    :effect (and"
      << atoms(acts[i].add);
    for (auto p : acts[i].del) d << " (not (p" << p << "))";
    d << "))\n";
  }
  d << ")\n";

  std::string name = "rnd-" + std::to_string(seed);
  std::ostringstream pr;
  pr << "(define (problem " << name << ") (:domain rnd)\n  (:init" << atoms(init) << ")\n  (:goal (and" << atoms(goal)
     << ")))\n";
  return {name, d.str(), pr.str()};
}

}  // namespace macroplan::gen
