#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "heuristics.hpp"
#include "macros.hpp"
#include "strips.hpp"

namespace macroplan {

enum class SearchStatus { solved, unsolvable, timeout, memory_out };

inline std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::solved: return "solved";
    case SearchStatus::unsolvable: return "unsolvable";
    case SearchStatus::timeout: return "timeout";
    case SearchStatus::memory_out: return "memory-out";
  }
  return "?";
}

inline constexpr std::size_t kDefaultMemoryBytes = std::size_t{8} << 30;

struct SearchConfig {
  HeuristicKind heuristic = HeuristicKind::ff;
  double timeout_s = 300.0;
  // Generated-node cap. When unset it is derived from memory_bytes and the
  // per-node footprint of the task.
  std::optional<std::size_t> node_budget;
  std::size_t memory_bytes = kDefaultMemoryBytes;
  const MacroLibrary* macro_library = nullptr;
  // Also record intermediate macro states in the duplicate table.
  bool record_macro_intermediates = false;
};

// Rough bytes per stored node: one state in the node, one as a hash key,
// plus bookkeeping.
inline std::size_t estimated_node_bytes(const GroundTask& task) {
  std::size_t state = sizeof(State) + (task.num_props() + 63) / 64 * 8;
  return 2 * state + 96;
}

inline std::size_t effective_node_budget(const SearchConfig& cfg, const GroundTask& task) {
  if (cfg.node_budget) return *cfg.node_budget;
  return std::max<std::size_t>(1, cfg.memory_bytes / estimated_node_bytes(task));
}

struct SearchResult {
  SearchStatus status = SearchStatus::unsolvable;
  std::optional<Plan> plan;
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t macro_applications = 0;  // macro successors generated
  std::size_t macro_steps = 0;         // macro steps used by the returned plan
  double wall_time_s = 0.0;
};

// Chained application: each constituent must be applicable to the state
// produced by its predecessor.
inline std::optional<State> apply_macro(const State& state, const MacroAction& macro) {
  State cur = state;
  for (const GroundAction* a : macro.actions) {
    if (!a->applicable(cur)) return std::nullopt;
    cur = apply(cur, *a);
  }
  return cur;
}

namespace detail {

class AStar {
 public:
  AStar(const GroundTask& task, const SearchConfig& cfg)
      : task_(task), cfg_(cfg), heuristic_(task), budget_(effective_node_budget(cfg, task)) {
    applicable_.resize(task.actions.size());
    if (cfg.macro_library)
      for (const auto& m : cfg.macro_library->macros) {
        if (m.actions.empty()) throw std::invalid_argument("macro library contains an empty macro");
        auto it = task.action_index.find(m.actions.front()->id);
        first_action_.push_back(it != task.action_index.end() && &task.actions[it->second] == m.actions.front()
                                    ? static_cast<std::int64_t>(it->second)
                                    : -1);
      }
  }

  SearchResult run() {
    const auto start = std::chrono::steady_clock::now();
    SearchResult res;
    res.status = search(start, res);
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

 private:
  struct Node {
    State state;
    int g = 0;
    int h = 0;
    std::int32_t parent = -1;
    std::int32_t action = -1;  // primitive edge
    std::int32_t macro = -1;   // macro edge
  };

  struct Seen {
    int g;
    int h;
    std::int32_t node;  // -1 when not stored as a node
  };

  struct OpenEntry {
    int f;
    int g;
    std::uint64_t order;
    std::uint32_t node;
  };

  // Smallest f first; among equal f, larger g; then insertion order.
  struct Worse {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const noexcept {
      if (a.f != b.f) return a.f > b.f;
      if (a.g != b.g) return a.g < b.g;
      return a.order > b.order;
    }
  };

  const GroundTask& task_;
  const SearchConfig& cfg_;
  DeleteRelaxation heuristic_;
  std::size_t budget_;
  std::vector<Node> nodes_;
  std::unordered_map<State, Seen, StateHash> seen_;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, Worse> open_;
  std::uint64_t order_ = 0;
  std::vector<char> applicable_;          // primitive applicability at the node being expanded
  std::vector<std::int64_t> first_action_;  // task index of each macro's first action, or -1

  enum class Offer { stored, pruned, over_budget };

  Offer offer(State state, int g, std::int32_t parent, std::int32_t action, std::int32_t macro, SearchResult& res) {
    int h;
    auto it = seen_.find(state);
    if (it != seen_.end()) {
      if (it->second.g <= g) return Offer::pruned;
      h = it->second.h;
    } else {
      h = heuristic_.evaluate(cfg_.heuristic, state);
    }
    if (h == kInfinity) {
      seen_.insert_or_assign(state, Seen{g, h, -1});
      return Offer::pruned;
    }
    if (nodes_.size() >= budget_) return Offer::over_budget;
    auto id = static_cast<std::int32_t>(nodes_.size());
    seen_.insert_or_assign(state, Seen{g, h, id});
    nodes_.push_back(Node{std::move(state), g, h, parent, action, macro});
    open_.push(OpenEntry{g + h, g, order_++, static_cast<std::uint32_t>(id)});
    ++res.generated;
    return Offer::stored;
  }

  void note_intermediate(const State& s, int g) {
    auto it = seen_.find(s);
    if (it == seen_.end()) {
      seen_.emplace(s, Seen{g, heuristic_.evaluate(cfg_.heuristic, s), -1});
    } else if (g < it->second.g) {
      it->second.g = g;
      it->second.node = -1;
    }
  }

  SearchStatus search(std::chrono::steady_clock::time_point start, SearchResult& res) {
    if (offer(task_.init, 0, -1, -1, -1, res) != Offer::stored)
      return nodes_.empty() && budget_ > 0 ? SearchStatus::unsolvable : SearchStatus::memory_out;

    const MacroLibrary* lib = cfg_.macro_library;
    const std::chrono::duration<double> limit(cfg_.timeout_s);

    while (!open_.empty()) {
      OpenEntry top = open_.top();
      open_.pop();
      const std::int32_t id = static_cast<std::int32_t>(top.node);
      {
        auto it = seen_.find(nodes_[id].state);
        if (it == seen_.end() || it->second.node != id) continue;  // superseded by a cheaper path
      }
      if (task_.is_goal(nodes_[id].state)) {
        res.plan = extract_plan(id, res);
        return SearchStatus::solved;
      }
      if (std::chrono::steady_clock::now() - start > limit) return SearchStatus::timeout;
      ++res.expanded;

      const State parent_state = nodes_[id].state;
      const int g = nodes_[id].g;

      for (std::size_t a = 0; a < task_.actions.size(); ++a) applicable_[a] = task_.actions[a].applicable(parent_state);

      if (lib) {
        for (std::size_t m = 0; m < lib->macros.size(); ++m) {
          const auto& macro = lib->macros[m];
          const std::int64_t first = first_action_[m];
          if (first >= 0 ? !applicable_[first] : !macro.actions.front()->applicable(parent_state)) continue;
          State cur = apply(parent_state, *macro.actions.front());
          int cost = g + macro.actions.front()->cost;
          if (cfg_.record_macro_intermediates && macro.actions.size() > 1) note_intermediate(cur, cost);
          bool ok = true;
          for (std::size_t k = 1; k < macro.actions.size(); ++k) {
            const GroundAction* a = macro.actions[k];
            if (!a->applicable(cur)) {
              ok = false;
              break;
            }
            cur = apply(cur, *a);
            cost += a->cost;
            if (cfg_.record_macro_intermediates && k + 1 < macro.actions.size()) note_intermediate(cur, cost);
          }
          if (!ok) continue;
          ++res.macro_applications;
          if (offer(std::move(cur), cost, id, -1, static_cast<std::int32_t>(m), res) == Offer::over_budget)
            return SearchStatus::memory_out;
        }
      }
      for (std::size_t a = 0; a < task_.actions.size(); ++a) {
        if (!applicable_[a]) continue;
        const auto& act = task_.actions[a];
        if (offer(apply(parent_state, act), g + act.cost, id, static_cast<std::int32_t>(a), -1, res) ==
            Offer::over_budget)
          return SearchStatus::memory_out;
      }
    }
    return SearchStatus::unsolvable;
  }

  Plan extract_plan(std::int32_t id, SearchResult& res) const {
    std::vector<std::int32_t> chain;
    for (std::int32_t n = id; nodes_[n].parent >= 0; n = nodes_[n].parent) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    Plan plan;
    for (std::int32_t n : chain) {
      const Node& node = nodes_[n];
      if (node.macro >= 0) {
        ++res.macro_steps;
        for (const GroundAction* a : cfg_.macro_library->macros[node.macro].actions) {
          plan.steps.push_back(a->id);
          plan.cost += a->cost;
        }
      } else {
        const auto& a = task_.actions[node.action];
        plan.steps.push_back(a.id);
        plan.cost += a.cost;
      }
    }
    return plan;
  }
};

inline void check_search_config(const SearchConfig& cfg) {
  if (!(cfg.timeout_s > 0)) throw std::invalid_argument("timeout must be positive");
}

}  // namespace detail

// Baseline A*: f = g + h, goal test when a node is selected. A goal initial
// state yields an empty plan with zero expansions.
inline SearchResult astar(const GroundTask& task, const SearchConfig& cfg) {
  detail::check_search_config(cfg);
  if (cfg.macro_library) throw std::invalid_argument("astar: macro library given; use search_with_macros");
  return detail::AStar(task, cfg).run();
}

// A* that tries every library macro (in library order) before the primitive
// operators when expanding a node. Returned plans contain primitive actions
// only.
inline SearchResult search_with_macros(const GroundTask& task, const SearchConfig& cfg) {
  detail::check_search_config(cfg);
  if (!cfg.macro_library) throw std::invalid_argument("search_with_macros: no macro library");
  return detail::AStar(task, cfg).run();
}

}  // namespace macroplan
