#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "strips.hpp"

namespace macroplan {

inline constexpr int kInfinity = std::numeric_limits<int>::max();

enum class HeuristicKind { ff, hadd, hmax, blind };

inline std::string_view to_string(HeuristicKind h) {
  switch (h) {
    case HeuristicKind::ff: return "ff";
    case HeuristicKind::hadd: return "hadd";
    case HeuristicKind::hmax: return "hmax";
    case HeuristicKind::blind: return "blind";
  }
  return "?";
}

inline std::optional<HeuristicKind> parse_heuristic(std::string_view s) {
  if (s == "ff") return HeuristicKind::ff;
  if (s == "hadd") return HeuristicKind::hadd;
  if (s == "hmax") return HeuristicKind::hmax;
  if (s == "blind") return HeuristicKind::blind;
  return std::nullopt;
}

// Delete-relaxation heuristics over one task. Holds per-search scratch
// buffers, so an instance must not be shared between concurrent searches.
class DeleteRelaxation {
 public:
  explicit DeleteRelaxation(const GroundTask& task) : task_(task) {
    const auto np = task.num_props();
    const auto na = task.actions.size();
    pre_of_.resize(np);
    achievers_.resize(np);
    for (std::size_t a = 0; a < na; ++a) {
      for (PropId p : task.actions[a].pre) pre_of_[p].push_back(a);
      for (PropId p : task.actions[a].add) achievers_[p].push_back(a);
    }
    prop_cost_.resize(np);
    action_acc_.resize(na);
    unsatisfied_.resize(na);
    acc_.resize(na);
    max_cost_.resize(np);
    action_max_.resize(na);
    action_add_.resize(na);
    marked_.resize(np);
    selected_.resize(na);
  }

  int hmax(const State& s) {
    relax(s, Combine::max);
    return goal_value(Combine::max);
  }

  int hadd(const State& s) {
    relax(s, Combine::sum);
    return goal_value(Combine::sum);
  }

  // Relaxed plan length. Each open subgoal is supported by an achiever from
  // the layer just below its own, preferring the achiever whose
  // preconditions have the smallest hadd sum; supporters' preconditions
  // become subgoals in turn. Shared actions are counted once.
  int ff(const State& s) {
    if (task_.is_goal(s)) return 0;
    relax(s, Combine::max);
    if (goal_value(Combine::max) == kInfinity) return kInfinity;
    max_cost_ = prop_cost_;
    action_max_ = action_acc_;
    relax(s, Combine::sum);
    action_add_ = action_acc_;

    std::fill(marked_.begin(), marked_.end(), false);
    std::fill(selected_.begin(), selected_.end(), false);
    std::vector<PropId> open(task_.goal.begin(), task_.goal.end());
    int count = 0;
    while (!open.empty()) {
      PropId g = open.back();
      open.pop_back();
      if (marked_[g]) continue;
      marked_[g] = true;
      const int layer = max_cost_[g];
      if (layer == 0) continue;
      std::size_t best = task_.actions.size();
      int best_difficulty = kInfinity;
      for (std::size_t a : achievers_[g]) {
        if (action_max_[a] == kInfinity || action_max_[a] + task_.actions[a].cost != layer) continue;
        if (action_add_[a] < best_difficulty) {
          best_difficulty = action_add_[a];
          best = a;
        }
      }
      if (best == task_.actions.size()) throw std::logic_error("relaxed plan extraction found no achiever");
      if (!selected_[best]) {
        selected_[best] = true;
        count += task_.actions[best].cost;
      }
      for (PropId f : task_.actions[best].pre)
        if (!marked_[f]) open.push_back(f);
    }
    return count;
  }

  int blind(const State& s) const { return task_.is_goal(s) ? 0 : 1; }

  int evaluate(HeuristicKind kind, const State& s) {
    switch (kind) {
      case HeuristicKind::ff: return ff(s);
      case HeuristicKind::hadd: return hadd(s);
      case HeuristicKind::hmax: return hmax(s);
      case HeuristicKind::blind: return blind(s);
    }
    return kInfinity;
  }

 private:
  enum class Combine { max, sum };

  const GroundTask& task_;
  std::vector<std::vector<std::size_t>> pre_of_;
  std::vector<std::vector<std::size_t>> achievers_;
  std::vector<int> prop_cost_;
  std::vector<int> action_acc_;  // combined precondition cost, kInfinity if unreached
  std::vector<std::size_t> unsatisfied_;
  std::vector<int> acc_;
  std::vector<int> max_cost_, action_max_, action_add_;
  std::vector<bool> marked_, selected_;

  static int saturating_add(int a, int b) {
    if (a == kInfinity || b == kInfinity) return kInfinity;
    long long s = static_cast<long long>(a) + b;
    return s >= kInfinity ? kInfinity - 1 : static_cast<int>(s);
  }

  // Generalised Dijkstra to the relaxed fixpoint.
  void relax(const State& s, Combine combine) {
    using Entry = std::pair<int, PropId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::fill(prop_cost_.begin(), prop_cost_.end(), kInfinity);
    for (std::size_t a = 0; a < task_.actions.size(); ++a) {
      unsatisfied_[a] = task_.actions[a].pre.size();
      action_acc_[a] = kInfinity;
    }
    for (PropId p : s.props()) {
      prop_cost_[p] = 0;
      queue.emplace(0, p);
    }
    auto fire = [&](std::size_t a, int acc) {
      action_acc_[a] = acc;
      int reach = saturating_add(acc, task_.actions[a].cost);
      for (PropId q : task_.actions[a].add) {
        if (reach < prop_cost_[q]) {
          prop_cost_[q] = reach;
          queue.emplace(reach, q);
        }
      }
    };
    for (std::size_t a = 0; a < task_.actions.size(); ++a)
      if (unsatisfied_[a] == 0) fire(a, 0);

    std::fill(acc_.begin(), acc_.end(), 0);
    auto& acc = acc_;
    while (!queue.empty()) {
      auto [c, p] = queue.top();
      queue.pop();
      if (c > prop_cost_[p]) continue;
      for (std::size_t a : pre_of_[p]) {
        acc[a] = combine == Combine::max ? std::max(acc[a], c) : saturating_add(acc[a], c);
        if (--unsatisfied_[a] == 0) fire(a, acc[a]);
      }
    }
  }

  int goal_value(Combine combine) const {
    int v = 0;
    for (PropId g : task_.goal) {
      if (prop_cost_[g] == kInfinity) return kInfinity;
      v = combine == Combine::max ? std::max(v, prop_cost_[g]) : saturating_add(v, prop_cost_[g]);
    }
    return v;
  }
};

}  // namespace macroplan
