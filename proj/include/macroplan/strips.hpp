#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <functional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pddl.hpp"

namespace macroplan {

using PropId = std::uint32_t;

class InapplicableAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical action identity: lowercase, single-spaced, parenthesised.
// "( Board  Car1 Port1 )" and "board car1 port1" both map to "(board car1 port1)".
inline std::string canonical_action_id(std::string_view text) {
  std::string out = "(";
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (out.size() > 1) out.push_back(' ');
    out += token;
    token.clear();
  };
  for (char c : text) {
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  out.push_back(')');
  return out;
}

inline std::string make_action_id(std::string_view name, std::span<const std::string> args) {
  std::string s = "(" + std::string(name);
  for (const auto& a : args) s += " " + a;
  return canonical_action_id(s + ")");
}

// Set of propositions over a fixed universe, stored as a bitset. Equality and
// hashing are therefore independent of insertion order.
class State {
 public:
  State() = default;
  explicit State(std::size_t num_props) : num_props_(num_props), words_((num_props + 63) / 64, 0) {}

  std::size_t universe() const noexcept { return num_props_; }

  bool contains(PropId p) const noexcept { return p < num_props_ && (words_[p >> 6] >> (p & 63)) & 1u; }
  void insert(PropId p) { words_.at(p >> 6) |= std::uint64_t{1} << (p & 63); }
  void erase(PropId p) { words_.at(p >> 6) &= ~(std::uint64_t{1} << (p & 63)); }

  template <class Range>
  bool contains_all(const Range& props) const noexcept {
    for (PropId p : props)
      if (!contains(p)) return false;
    return true;
  }

  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<PropId> props() const {
    std::vector<PropId> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        out.push_back(static_cast<PropId>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

  std::size_t memory_bytes() const noexcept { return sizeof(State) + words_.size() * sizeof(std::uint64_t); }

  friend bool operator==(const State& a, const State& b) noexcept { return a.words_ == b.words_; }

 private:
  std::size_t num_props_ = 0;
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept { return s.hash(); }
};

struct GroundAction {
  std::string id;
  std::vector<PropId> pre;
  std::vector<PropId> add;
  std::vector<PropId> del;
  int cost = 1;
  std::size_t op = 0;  // index into Domain::operators
  std::vector<std::string> args;

  bool applicable(const State& s) const noexcept { return s.contains_all(pre); }
};

struct Plan {
  std::vector<std::string> steps;
  int cost = 0;
  friend bool operator==(const Plan&, const Plan&) = default;
};

// A grounded problem: proposition table, action set, init and goal.
struct GroundTask {
  std::vector<std::string> propositions;
  std::unordered_map<std::string, PropId> prop_index;
  std::vector<GroundAction> actions;
  std::unordered_map<std::string, std::size_t> action_index;
  State init;
  std::vector<PropId> goal;

  std::size_t num_props() const noexcept { return propositions.size(); }

  bool is_goal(const State& s) const noexcept { return s.contains_all(goal); }

  const GroundAction* find_action(std::string_view id) const {
    auto it = action_index.find(canonical_action_id(id));
    return it == action_index.end() ? nullptr : &actions[it->second];
  }

  State make_state(std::span<const PropId> props) const {
    State s(num_props());
    for (PropId p : props) s.insert(p);
    return s;
  }

  std::vector<std::string> describe(const State& s) const {
    std::vector<std::string> out;
    for (PropId p : s.props()) out.push_back(propositions[p]);
    return out;
  }
};

inline State apply(const State& state, const GroundAction& action) {
  if (!action.applicable(state)) throw InapplicableAction("action " + action.id + " is not applicable");
  State next = state;
  for (PropId p : action.del) next.erase(p);
  for (PropId p : action.add) next.insert(p);
  return next;
}

namespace detail {

class Grounder {
 public:
  Grounder(const Domain& d, const Problem& p) : domain_(d), problem_(p) {}

  GroundTask run() {
    for (const auto& op : domain_.operators) {
      for (const auto& a : op.add) fluent_.insert(a.predicate);
      for (const auto& a : op.del) fluent_.insert(a.predicate);
    }
    for (const auto& a : problem_.init) init_atoms_.insert(to_string(a));
    for (const auto& c : domain_.constants) objects_.push_back(c);
    for (const auto& o : problem_.objects) objects_.push_back(o);

    for (const auto& a : problem_.init) intern(to_string(a));
    for (const auto& a : problem_.goal) intern(to_string(a));
    for (std::size_t i = 0; i < domain_.operators.size(); ++i) ground_operator(i);

    task_.init = State(task_.num_props());
    for (const auto& a : problem_.init) task_.init.insert(task_.prop_index.at(to_string(a)));
    for (const auto& a : problem_.goal) task_.goal.push_back(task_.prop_index.at(to_string(a)));
    return std::move(task_);
  }

 private:
  const Domain& domain_;
  const Problem& problem_;
  std::set<std::string, std::less<>> fluent_;
  std::set<std::string, std::less<>> init_atoms_;
  std::vector<TypedName> objects_;
  GroundTask task_;

  PropId intern(const std::string& atom) {
    auto [it, inserted] = task_.prop_index.emplace(atom, static_cast<PropId>(task_.propositions.size()));
    if (inserted) task_.propositions.push_back(atom);
    return it->second;
  }

  static std::string instantiate(const Atom& a, const std::vector<TypedName>& params,
                                 const std::vector<std::string>& binding) {
    std::string s = "(" + a.predicate;
    for (const auto& t : a.args) {
      s += ' ';
      if (!t.empty() && t[0] == '?') {
        for (std::size_t k = 0; k < params.size(); ++k)
          if (params[k].name == t) {
            s += binding[k];
            break;
          }
      } else {
        s += t;
      }
    }
    return s + ")";
  }

  void ground_operator(std::size_t op_index) {
    const Operator& op = domain_.operators[op_index];
    const std::size_t n = op.params.size();

    std::vector<std::vector<std::string>> candidates(n);
    for (std::size_t k = 0; k < n; ++k)
      for (const auto& o : objects_)
        if (domain_.is_subtype(o.type, op.params[k].type)) candidates[k].push_back(o.name);

    // Static preconditions, each checked as soon as its last variable is bound.
    std::vector<std::vector<const Atom*>> static_at(n + 1);
    for (const auto& a : op.pre) {
      if (fluent_.contains(a.predicate)) continue;
      std::size_t last = 0;
      for (const auto& t : a.args)
        for (std::size_t k = 0; k < n; ++k)
          if (op.params[k].name == t) last = std::max(last, k + 1);
      static_at[last].push_back(&a);
    }

    std::vector<std::string> binding(n);
    auto statics_hold = [&](std::size_t depth) {
      for (const Atom* a : static_at[depth])
        if (!init_atoms_.contains(instantiate(*a, op.params, binding))) return false;
      return true;
    };
    if (!statics_hold(0)) return;

    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == n) {
        emit(op_index, binding);
        return;
      }
      for (const auto& obj : candidates[k]) {
        binding[k] = obj;
        if (statics_hold(k + 1)) rec(k + 1);
      }
    };
    rec(0);
  }

  void emit(std::size_t op_index, const std::vector<std::string>& binding) {
    const Operator& op = domain_.operators[op_index];
    GroundAction ga;
    ga.op = op_index;
    ga.args = binding;
    ga.id = make_action_id(op.name, binding);
    auto collect = [&](const std::vector<Atom>& atoms, std::vector<PropId>& out) {
      for (const auto& a : atoms) out.push_back(intern(instantiate(a, op.params, binding)));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    };
    collect(op.pre, ga.pre);
    collect(op.add, ga.add);
    collect(op.del, ga.del);
    std::erase_if(ga.del, [&](PropId p) { return std::binary_search(ga.add.begin(), ga.add.end(), p); });
    task_.action_index.emplace(ga.id, task_.actions.size());
    task_.actions.push_back(std::move(ga));
  }
};

}  // namespace detail

// Instantiates every operator over type-consistent object tuples, pruning
// tuples whose static preconditions (predicates never added or deleted) are
// false in init.
inline GroundTask ground(const Domain& domain, const Problem& problem) {
  return detail::Grounder(domain, problem).run();
}

// True iff the sequence is applicable from init and ends in a goal state.
inline bool validate_plan(const GroundTask& task, std::span<const GroundAction> actions) {
  State s = task.init;
  for (const auto& a : actions) {
    if (!a.applicable(s)) return false;
    s = apply(s, a);
  }
  return task.is_goal(s);
}

// Resolves identities first; unknown identities raise UnknownAction.
inline bool validate_plan(const GroundTask& task, std::span<const std::string> steps) {
  std::vector<GroundAction> actions;
  actions.reserve(steps.size());
  for (const auto& id : steps) {
    const GroundAction* a = task.find_action(id);
    if (!a) throw UnknownAction("unknown action " + canonical_action_id(id));
    actions.push_back(*a);
  }
  return validate_plan(task, std::span<const GroundAction>(actions));
}

inline bool validate_plan(const GroundTask& task, const Plan& plan) {
  return validate_plan(task, std::span<const std::string>(plan.steps));
}

// Plan wire format: one `(name arg ...)` per line; blank lines and `;`
// comments are ignored.
inline Plan parse_plan(std::string_view text) {
  Plan plan;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (auto c = line.find(';'); c != std::string_view::npos) line = line.substr(0, c);
    bool blank = std::all_of(line.begin(), line.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
    if (!blank) {
      plan.steps.push_back(canonical_action_id(line));
      ++plan.cost;
    }
    start = end + 1;
  }
  return plan;
}

inline std::string format_plan(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) out += s + "\n";
  out += "; cost = " + std::to_string(plan.cost) + " (unit cost)\n";
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace macroplan
