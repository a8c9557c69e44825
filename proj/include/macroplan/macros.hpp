#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "miner.hpp"
#include "strips.hpp"

namespace macroplan {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MacroAction {
  std::vector<const GroundAction*> actions;  // owned by the GroundTask
  std::vector<std::string> ids;
  std::size_t support = 0;
  int cost = 0;

  std::size_t size() const noexcept { return actions.size(); }
};

struct LearnReport {
  std::size_t corpus_size = 0;
  std::size_t sigma = 0;
  std::size_t mined = 0;
  std::size_t kept = 0;
  std::size_t dropped_unresolved = 0;
  std::size_t dropped_too_short = 0;

  std::size_t dropped() const noexcept { return dropped_unresolved + dropped_too_short; }
};

// Macros valid for one grounded problem, ordered by descending support, then
// descending length, then lexicographic identity.
struct MacroLibrary {
  std::vector<MacroAction> macros;
  MinerConfig config;
  std::string corpus;
  LearnReport report;

  bool empty() const noexcept { return macros.empty(); }
  std::size_t size() const noexcept { return macros.size(); }
};

// Lookup by canonical identity; absent when the problem has no such action.
inline const GroundAction* resolve_action(std::string_view id, const GroundTask& task) {
  return task.find_action(id);
}

inline void sort_library(std::vector<MacroAction>& macros) {
  std::stable_sort(macros.begin(), macros.end(), [](const MacroAction& a, const MacroAction& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.size() != b.size()) return a.size() > b.size();
    return a.ids < b.ids;
  });
}

// Membership filter: keep a pattern only if every action resolves in `task`.
inline MacroLibrary build_library(const SequenceDatabase& db, const std::vector<Pattern>& patterns,
                                  const MinerConfig& cfg, const GroundTask& task) {
  MacroLibrary lib;
  lib.config = cfg;
  lib.report.corpus_size = db.size();
  lib.report.sigma = cfg.sigma(db.size());
  lib.report.mined = patterns.size();
  for (const auto& p : patterns) {
    if (p.items.size() < 2) {
      ++lib.report.dropped_too_short;
      continue;
    }
    MacroAction m;
    m.support = p.support;
    bool ok = true;
    for (ItemId item : p.items) {
      const GroundAction* a = resolve_action(db.alphabet()[item], task);
      if (!a) {
        ok = false;
        break;
      }
      m.actions.push_back(a);
      m.ids.push_back(a->id);
      m.cost += a->cost;
    }
    if (!ok) {
      ++lib.report.dropped_unresolved;
      continue;
    }
    lib.macros.push_back(std::move(m));
  }
  sort_library(lib.macros);
  lib.report.kept = lib.macros.size();
  return lib;
}

inline SequenceDatabase corpus_database(const std::vector<Plan>& corpus) {
  if (corpus.empty()) throw CorpusError("empty corpus");
  SequenceDatabase db;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].steps.empty()) throw CorpusError("corpus plan #" + std::to_string(i) + " is empty");
    std::vector<std::string> seq;
    for (const auto& s : corpus[i].steps) seq.push_back(canonical_action_id(s));
    db.add(seq);
  }
  return db;
}

// Mines closed patterns from solution plans and keeps those whose every
// action belongs to the target problem.
inline MacroLibrary learn_macros(const std::vector<Plan>& corpus, const MinerConfig& cfg, const GroundTask& task,
                                 std::string corpus_name = {}) {
  SequenceDatabase db = corpus_database(corpus);
  auto patterns = mine_closed(db, cfg);
  auto lib = build_library(db, patterns, cfg, task);
  lib.corpus = std::move(corpus_name);
  return lib;
}

// One macro per line: `support<TAB>(a1) (a2) ... (an)`.
inline std::string format_library(const MacroLibrary& lib) {
  std::ostringstream os;
  for (const auto& m : lib.macros) {
    os << m.support << '\t';
    for (std::size_t i = 0; i < m.ids.size(); ++i) os << (i ? " " : "") << m.ids[i];
    os << '\n';
  }
  return os.str();
}

struct LibraryEntry {
  std::size_t support = 0;
  std::vector<std::string> ids;
  friend bool operator==(const LibraryEntry&, const LibraryEntry&) = default;
};

inline std::vector<LibraryEntry> parse_library_entries(std::string_view text) {
  std::vector<LibraryEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == ';' || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw std::runtime_error("macro library line " + std::to_string(line_no) + ": missing tab");
    LibraryEntry e;
    try {
      e.support = std::stoul(line.substr(0, tab));
    } catch (const std::exception&) {
      throw std::runtime_error("macro library line " + std::to_string(line_no) + ": bad support");
    }
    std::string rest = line.substr(tab + 1);
    std::size_t pos = 0;
    while ((pos = rest.find('(', pos)) != std::string::npos) {
      auto close = rest.find(')', pos);
      if (close == std::string::npos)
        throw std::runtime_error("macro library line " + std::to_string(line_no) + ": unbalanced parenthesis");
      e.ids.push_back(canonical_action_id(rest.substr(pos, close - pos + 1)));
      pos = close + 1;
    }
    if (e.ids.empty()) throw std::runtime_error("macro library line " + std::to_string(line_no) + ": no actions");
    out.push_back(std::move(e));
  }
  return out;
}

// Loads a library file against a task. Entries naming unknown actions are
// dropped and counted; file order is preserved.
inline MacroLibrary load_library(std::string_view text, const GroundTask& task) {
  MacroLibrary lib;
  for (auto& e : parse_library_entries(text)) {
    ++lib.report.mined;
    if (e.ids.size() < 2) {
      ++lib.report.dropped_too_short;
      continue;
    }
    MacroAction m;
    m.support = e.support;
    for (const auto& id : e.ids) {
      const GroundAction* a = resolve_action(id, task);
      if (!a) break;
      m.actions.push_back(a);
      m.ids.push_back(a->id);
      m.cost += a->cost;
    }
    if (m.actions.size() != e.ids.size()) {
      ++lib.report.dropped_unresolved;
      continue;
    }
    // a repeated sequence keeps its highest support
    auto dup = std::find_if(lib.macros.begin(), lib.macros.end(), [&](const MacroAction& x) { return x.ids == m.ids; });
    if (dup != lib.macros.end()) {
      dup->support = std::max(dup->support, m.support);
      continue;
    }
    lib.macros.push_back(std::move(m));
  }
  sort_library(lib.macros);
  lib.report.kept = lib.macros.size();
  return lib;
}

}  // namespace macroplan
