#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sexpr.hpp"

namespace macroplan {

// Raised when the input uses PDDL beyond :strips + :typing.
class UnsupportedFeature : public std::runtime_error {
 public:
  UnsupportedFeature(const std::string& construct, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": unsupported PDDL construct '" + construct + "'"),
        construct_(construct) {}

  const std::string& construct() const noexcept { return construct_; }

 private:
  std::string construct_;
};

// Semantic errors: undeclared names, arity mismatches, duplicate definitions.
class PddlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};
  friend bool operator==(const TypedName&, const TypedName&) = default;
};

// Atom over terms; a term starting with '?' is a variable, anything else a
// constant or object name.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

inline std::string to_string(const Atom& a) {
  std::string s = "(" + a.predicate;
  for (const auto& arg : a.args) s += " " + arg;
  return s + ")";
}

struct Predicate {
  std::string name;
  std::vector<TypedName> params;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Operator {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Atom> pre;
  std::vector<Atom> add;
  std::vector<Atom> del;
  friend bool operator==(const Operator&, const Operator&) = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;  // name - parent
  std::vector<TypedName> constants;
  std::vector<Predicate> predicates;
  std::vector<Operator> operators;

  friend bool operator==(const Domain&, const Domain&) = default;

  const Predicate* find_predicate(std::string_view n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }

  const Operator* find_operator(std::string_view n) const {
    for (const auto& o : operators)
      if (o.name == n) return &o;
    return nullptr;
  }

  bool has_type(std::string_view t) const {
    if (t == kRootType) return true;
    return std::any_of(types.begin(), types.end(), [&](const TypedName& x) { return x.name == t; });
  }

  std::string parent_of(std::string_view t) const {
    for (const auto& x : types)
      if (x.name == t) return x.type;
    return std::string(kRootType);
  }

  // True if `sub` equals `super` or descends from it.
  bool is_subtype(std::string_view sub, std::string_view super) const {
    std::string cur(sub);
    for (std::size_t guard = 0; guard <= types.size() + 1; ++guard) {
      if (cur == super) return true;
      if (cur == kRootType) return false;
      cur = parent_of(cur);
    }
    return false;
  }
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Atom> goal;
  friend bool operator==(const Problem&, const Problem&) = default;
};

namespace detail {

inline const std::set<std::string, std::less<>>& supported_requirements() {
  static const std::set<std::string, std::less<>> kSupported{":strips", ":typing"};
  return kSupported;
}

inline void check_requirements(const SExpr& section, std::vector<std::string>& out) {
  for (std::size_t i = 1; i < section.size(); ++i) {
    const auto& r = section[i];
    if (!r.is_atom()) r.fail("requirement must be a keyword");
    if (!supported_requirements().contains(r.atom)) throw UnsupportedFeature(r.atom, r.line, r.column);
    out.push_back(r.atom);
  }
}

// `a b - t c` -> a:t b:t c:object
inline std::vector<TypedName> parse_typed_list(const SExpr& list, std::size_t from = 0) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = from; i < list.size(); ++i) {
    const auto& e = list[i];
    if (e.is_list) {
      if (e.head() == "either") throw UnsupportedFeature("either", e.line, e.column);
      e.fail("expected name in typed list");
    }
    if (e.atom == "-") {
      if (i + 1 >= list.size()) e.fail("missing type after '-'");
      const auto& t = list[i + 1];
      if (t.is_list) {
        if (t.head() == "either") throw UnsupportedFeature("either", t.line, t.column);
        t.fail("expected type name");
      }
      if (pending == 0) e.fail("'-' without preceding names");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = t.atom;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back(TypedName{e.atom, std::string(kRootType)});
    ++pending;
  }
  return out;
}

inline Atom parse_atom(const SExpr& e) {
  if (!e.is_list || e.items.empty() || e[0].is_list) e.fail("expected atom");
  Atom a{e[0].atom, {}};
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i].is_list) e[i].fail("nested term in atom");
    a.args.push_back(e[i].atom);
  }
  return a;
}

inline void reject_connective(const SExpr& e, std::string_view context) {
  static const std::map<std::string, std::string, std::less<>> kNames{
      {"not", "negative-preconditions"}, {"or", "disjunctive-preconditions"},
      {"imply", "disjunctive-preconditions"}, {"exists", "existential-preconditions"},
      {"forall", context == "effect" ? "universal-effects" : "universal-preconditions"},
      {"when", "conditional-effects"}, {"=", "equality"},
      {"increase", "action-costs"}, {"decrease", "numeric-fluents"},
      {"assign", "numeric-fluents"}, {"at", "timed-initial-literals"},
      {"preference", "preferences"}};
  auto h = e.head();
  if (auto it = kNames.find(h); it != kNames.end()) {
    // `at` is also a common predicate name; only reject it when it looks temporal.
    if (h == "at" && !(e.size() == 3 && e[1].is_atom() && (e[1].atom == "start" || e[1].atom == "end")))
      return;
    throw UnsupportedFeature(it->second, e.line, e.column);
  }
}

inline std::vector<Atom> parse_condition(const SExpr& e) {
  std::vector<Atom> out;
  if (!e.is_list) e.fail("expected condition");
  if (e.items.empty()) return out;
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.size(); ++i) {
      auto sub = parse_condition(e[i]);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  reject_connective(e, "precondition");
  out.push_back(parse_atom(e));
  return out;
}

inline void parse_effect(const SExpr& e, std::vector<Atom>& add, std::vector<Atom>& del) {
  if (!e.is_list) e.fail("expected effect");
  if (e.items.empty()) return;
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.size(); ++i) parse_effect(e[i], add, del);
    return;
  }
  if (e.head() == "not") {
    if (e.size() != 2) e.fail("'not' takes exactly one atom");
    reject_connective(e[1], "effect");
    del.push_back(parse_atom(e[1]));
    return;
  }
  reject_connective(e, "effect");
  add.push_back(parse_atom(e));
}

template <class Range>
void dedupe_in_place(Range& v) {
  std::vector<typename Range::value_type> out;
  for (auto& x : v)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  v = std::move(out);
}

inline Operator parse_action(const SExpr& e) {
  if (e.size() < 2 || e[1].is_list) e.fail("action needs a name");
  Operator op;
  op.name = e[1].atom;
  for (std::size_t i = 2; i < e.size(); i += 2) {
    const auto& key = e[i];
    if (!key.is_atom()) key.fail("expected action keyword");
    if (i + 1 >= e.size()) key.fail("missing value for " + key.atom);
    const auto& val = e[i + 1];
    if (key.atom == ":parameters") {
      if (!val.is_list) val.fail("parameters must be a list");
      op.params = parse_typed_list(val);
    } else if (key.atom == ":precondition") {
      op.pre = parse_condition(val);
    } else if (key.atom == ":effect") {
      parse_effect(val, op.add, op.del);
    } else {
      throw UnsupportedFeature(key.atom, key.line, key.column);
    }
  }
  dedupe_in_place(op.pre);
  dedupe_in_place(op.add);
  dedupe_in_place(op.del);
  // Delete-then-add semantics: an atom both added and deleted is added.
  std::erase_if(op.del, [&](const Atom& a) { return std::find(op.add.begin(), op.add.end(), a) != op.add.end(); });
  return op;
}

inline void check_operator(const Domain& d, const Operator& op, const std::map<std::string, std::string>& constants) {
  std::map<std::string, std::string> vars;
  for (const auto& p : op.params) {
    if (p.name.empty() || p.name[0] != '?') throw PddlError("operator " + op.name + ": parameter '" + p.name + "' is not a variable");
    if (!d.has_type(p.type)) throw PddlError("operator " + op.name + ": undeclared type '" + p.type + "'");
    if (!vars.emplace(p.name, p.type).second) throw PddlError("operator " + op.name + ": duplicate parameter " + p.name);
  }
  auto check = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
      const Predicate* pred = d.find_predicate(a.predicate);
      if (!pred) throw PddlError("operator " + op.name + ": undeclared predicate '" + a.predicate + "'");
      if (pred->params.size() != a.args.size())
        throw PddlError("operator " + op.name + ": wrong arity for " + to_string(a));
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        const auto& arg = a.args[i];
        std::string type;
        if (!arg.empty() && arg[0] == '?') {
          auto it = vars.find(arg);
          if (it == vars.end()) throw PddlError("operator " + op.name + ": unbound variable " + arg);
          type = it->second;
        } else {
          auto it = constants.find(arg);
          if (it == constants.end()) throw PddlError("operator " + op.name + ": undeclared constant " + arg);
          type = it->second;
        }
        const auto& want = pred->params[i].type;
        if (!d.is_subtype(type, want) && !d.is_subtype(want, type))
          throw PddlError("operator " + op.name + ": type mismatch for " + arg + " in " + to_string(a));
      }
    }
  };
  check(op.pre);
  check(op.add);
  check(op.del);
}

}  // namespace detail

inline Domain parse_domain(std::string_view text) {
  SExpr root = read_sexpr(text);
  if (root.head() != "define") root.fail("expected (define ...)");
  if (root.size() < 2 || root[1].head() != "domain" || root[1].size() != 2 || root[1][1].is_list)
    root.fail("expected (domain <name>)");
  Domain d;
  d.name = root[1][1].atom;
  std::vector<Operator> ops;
  for (std::size_t i = 2; i < root.size(); ++i) {
    const auto& sec = root[i];
    auto h = sec.head();
    if (h == ":requirements") {
      detail::check_requirements(sec, d.requirements);
    } else if (h == ":types") {
      for (auto& t : detail::parse_typed_list(sec, 1)) {
        if (t.name == kRootType) continue;
        d.types.push_back(std::move(t));
      }
    } else if (h == ":constants") {
      auto cs = detail::parse_typed_list(sec, 1);
      d.constants.insert(d.constants.end(), cs.begin(), cs.end());
    } else if (h == ":predicates") {
      for (std::size_t k = 1; k < sec.size(); ++k) {
        const auto& p = sec[k];
        if (!p.is_list || p.items.empty() || p[0].is_list) p.fail("expected predicate declaration");
        if (d.find_predicate(p[0].atom)) p.fail("duplicate predicate '" + p[0].atom + "'");
        d.predicates.push_back(Predicate{p[0].atom, detail::parse_typed_list(p, 1)});
      }
    } else if (h == ":action") {
      auto op = detail::parse_action(sec);
      if (d.find_operator(op.name)) sec.fail("duplicate operator '" + op.name + "'");
      d.operators.push_back(std::move(op));
    } else if (!h.empty()) {
      throw UnsupportedFeature(std::string(h), sec.line, sec.column);
    } else {
      sec.fail("unexpected domain section");
    }
  }

  for (const auto& t : d.types)
    if (!d.has_type(t.type)) throw PddlError("undeclared parent type '" + t.type + "'");
  std::map<std::string, std::string> constants;
  for (const auto& c : d.constants) {
    if (!d.has_type(c.type)) throw PddlError("constant " + c.name + " has undeclared type '" + c.type + "'");
    if (!constants.emplace(c.name, c.type).second) throw PddlError("duplicate constant " + c.name);
  }
  for (const auto& p : d.predicates)
    for (const auto& a : p.params)
      if (!d.has_type(a.type)) throw PddlError("predicate " + p.name + " uses undeclared type '" + a.type + "'");
  for (const auto& op : d.operators) detail::check_operator(d, op, constants);
  return d;
}

inline Problem parse_problem(std::string_view text, const Domain& domain) {
  SExpr root = read_sexpr(text);
  if (root.head() != "define") root.fail("expected (define ...)");
  if (root.size() < 2 || root[1].head() != "problem" || root[1].size() != 2 || root[1][1].is_list)
    root.fail("expected (problem <name>)");
  Problem p;
  p.name = root[1][1].atom;
  bool have_goal = false;
  for (std::size_t i = 2; i < root.size(); ++i) {
    const auto& sec = root[i];
    auto h = sec.head();
    if (h == ":domain") {
      if (sec.size() != 2 || sec[1].is_list) sec.fail("expected (:domain <name>)");
      p.domain_name = sec[1].atom;
    } else if (h == ":requirements") {
      std::vector<std::string> ignored;
      detail::check_requirements(sec, ignored);
    } else if (h == ":objects") {
      auto os = detail::parse_typed_list(sec, 1);
      p.objects.insert(p.objects.end(), os.begin(), os.end());
    } else if (h == ":init") {
      for (std::size_t k = 1; k < sec.size(); ++k) {
        detail::reject_connective(sec[k], "init");
        p.init.push_back(detail::parse_atom(sec[k]));
      }
    } else if (h == ":goal") {
      if (sec.size() != 2) sec.fail("expected a single goal formula");
      p.goal = detail::parse_condition(sec[1]);
      have_goal = true;
    } else if (!h.empty()) {
      throw UnsupportedFeature(std::string(h), sec.line, sec.column);
    } else {
      sec.fail("unexpected problem section");
    }
  }
  if (p.domain_name != domain.name)
    throw PddlError("problem references domain '" + p.domain_name + "' but domain is '" + domain.name + "'");
  if (!have_goal) root.fail("problem has no :goal");
  detail::dedupe_in_place(p.init);
  detail::dedupe_in_place(p.goal);

  std::map<std::string, std::string> objects;
  for (const auto& c : domain.constants) objects.emplace(c.name, c.type);
  for (const auto& o : p.objects) {
    if (!domain.has_type(o.type)) throw PddlError("object " + o.name + " has undeclared type '" + o.type + "'");
    if (!objects.emplace(o.name, o.type).second) throw PddlError("duplicate object " + o.name);
  }
  auto check = [&](const std::vector<Atom>& atoms, const char* where) {
    for (const auto& a : atoms) {
      const Predicate* pred = domain.find_predicate(a.predicate);
      if (!pred) throw PddlError(std::string(where) + ": undeclared predicate '" + a.predicate + "'");
      if (pred->params.size() != a.args.size())
        throw PddlError(std::string(where) + ": wrong arity for " + to_string(a));
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        auto it = objects.find(a.args[k]);
        if (it == objects.end()) throw PddlError(std::string(where) + ": undeclared object '" + a.args[k] + "'");
        if (!domain.is_subtype(it->second, pred->params[k].type))
          throw PddlError(std::string(where) + ": object " + a.args[k] + " has wrong type in " + to_string(a));
      }
    }
  };
  check(p.init, "init");
  check(p.goal, "goal");
  return p;
}

namespace detail {

inline void print_typed(std::ostream& os, const std::vector<TypedName>& xs) {
  bool first = true;
  for (const auto& x : xs) {
    if (!first) os << ' ';
    first = false;
    os << x.name << " - " << x.type;
  }
}

inline void print_conjunction(std::ostream& os, const std::vector<Atom>& atoms) {
  os << "(and";
  for (const auto& a : atoms) os << ' ' << to_string(a);
  os << ')';
}

}  // namespace detail

inline std::string to_pddl(const Domain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types ";
    detail::print_typed(os, d.types);
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants ";
    detail::print_typed(os, d.constants);
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << " (" << p.name;
    if (!p.params.empty()) os << ' ';
    detail::print_typed(os, p.params);
    os << ')';
  }
  os << ")\n";
  for (const auto& op : d.operators) {
    os << "  (:action " << op.name << "\n    :parameters (";
    detail::print_typed(os, op.params);
    os << ")\n    :precondition ";
    detail::print_conjunction(os, op.pre);
    os << "\n    :effect (and";
    for (const auto& a : op.add) os << ' ' << to_string(a);
    for (const auto& a : op.del) os << " (not " << to_string(a) << ')';
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string to_pddl(const Problem& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain_name << ")\n  (:objects ";
  detail::print_typed(os, p.objects);
  os << ")\n  (:init";
  for (const auto& a : p.init) os << ' ' << to_string(a);
  os << ")\n  (:goal ";
  detail::print_conjunction(os, p.goal);
  os << "))\n";
  return os.str();
}

}  // namespace macroplan
