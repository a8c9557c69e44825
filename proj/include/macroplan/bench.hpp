#pragma once

// Benchmark harness: baseline-vs-macro runs over a train/test split, IPC
// time and quality scores, and improvement percentages per support level.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "macros.hpp"
#include "miner.hpp"
#include "pddl.hpp"
#include "records.hpp"
#include "search.hpp"
#include "strips.hpp"

namespace macroplan::bench {

namespace fs = std::filesystem;

inline constexpr double kClockFloor = 1e-3;

// IPC time score T*/T; unsolved scores 0. Times below the clock floor are
// raised to it.
inline double time_score(double t_best, double t, bool solved) {
  if (!solved) return 0.0;
  double best = std::max(t_best, kClockFloor);
  double mine = std::max(t, kClockFloor);
  return std::min(1.0, best / mine);
}

// IPC quality score Q*/Q; unsolved scores 0.
inline double quality_score(double q_best, double q, bool solved) {
  if (!solved) return 0.0;
  if (q <= 0.0) return 1.0;  // empty plan: nothing can beat it
  return std::clamp(q_best / q, 0.0, 1.0);
}

// Percentage change of `config` over `baseline`. Absent when the baseline is
// zero and the configuration is not (reported as "inf").
inline std::optional<double> improvement(double baseline, double config) {
  if (baseline == 0.0) {
    if (config == 0.0) return 0.0;
    return std::nullopt;
  }
  return (config - baseline) / baseline * 100.0;
}

inline std::string format_improvement(const std::optional<double>& v) {
  if (!v) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << *v;
  return os.str();
}

inline std::string support_label(double support) {
  return "supp" + std::to_string(static_cast<int>(std::lround(support * 100.0)));
}

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainSet {
  std::string name;
  std::string domain_file;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct ExperimentConfig {
  std::vector<DomainSet> domains;
  std::vector<double> supports{0.10, 0.20, 0.30};
  double timeout_s = 300.0;
  std::size_t memory_bytes = kDefaultMemoryBytes;
  std::optional<std::size_t> node_budget;
  HeuristicKind heuristic = HeuristicKind::ff;
  std::size_t min_length = 2;
  std::optional<std::size_t> max_length;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  bool record_macro_intermediates = false;

  void validate() const {
    if (!(timeout_s > 0)) throw ManifestError("timeout_s must be positive");
    if (jobs == 0) throw ManifestError("jobs must be >= 1");
    for (double s : supports)
      if (!(s > 0.0 && s <= 1.0)) throw ManifestError("support levels must lie in (0, 1]");
    for (const auto& d : domains) {
      std::set<fs::path> train;
      for (const auto& t : d.train) train.insert(fs::weakly_canonical(t));
      for (const auto& t : d.test)
        if (train.contains(fs::weakly_canonical(t)))
          throw ManifestError("domain " + d.name + ": " + t + " is in both train and test sets");
    }
  }

  SearchConfig search_config() const {
    SearchConfig sc;
    sc.heuristic = heuristic;
    sc.timeout_s = timeout_s;
    sc.memory_bytes = memory_bytes;
    sc.node_budget = node_budget;
    sc.record_macro_intermediates = record_macro_intermediates;
    return sc;
  }
};

namespace detail {

inline bool wildcard_match(std::string_view pat, std::string_view s) {
  if (pat.empty()) return s.empty();
  if (pat[0] == '*') {
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (wildcard_match(pat.substr(1), s.substr(i))) return true;
    return false;
  }
  if (s.empty()) return false;
  return (pat[0] == '?' || pat[0] == s[0]) && wildcard_match(pat.substr(1), s.substr(1));
}

}  // namespace detail

// Expands `*`/`?` in the file-name component. Results are sorted. A
// non-wildcard path must exist.
inline std::vector<std::string> expand_glob(const std::string& pattern, const fs::path& base) {
  fs::path p(pattern);
  if (p.is_relative()) p = base / p;
  std::string fname = p.filename().string();
  if (fname.find_first_of("*?") == std::string::npos) {
    if (!fs::exists(p)) throw ManifestError("missing file: " + p.string());
    return {p.string()};
  }
  fs::path dir = p.parent_path();
  if (!fs::is_directory(dir)) throw ManifestError("missing directory: " + dir.string());
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && detail::wildcard_match(fname, e.path().filename().string())) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

// JSON manifest. Relative paths resolve against `base`.
//   {"domains": [{"name": "ferry", "domain": "ferry/domain.pddl",
//                 "train": ["ferry/train/*.pddl"], "test": ["ferry/test/*.pddl"]}],
//    "supports": [0.1, 0.2, 0.3], "timeout_s": 300, "memory_mb": 8192,
//    "node_budget": null, "heuristic": "ff", "min_len": 2, "max_len": null,
//    "jobs": 1, "seed": 0}
inline ExperimentConfig parse_manifest(std::string_view text, const fs::path& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError(std::string("manifest: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (!j.contains("domains") || !j["domains"].is_array()) throw ManifestError("manifest: 'domains' array required");
    for (const auto& d : j["domains"]) {
      DomainSet ds;
      ds.domain_file = d.at("domain").get<std::string>();
      fs::path df(ds.domain_file);
      if (df.is_relative()) df = base / df;
      if (!fs::exists(df)) throw ManifestError("missing domain file: " + df.string());
      ds.domain_file = df.string();
      ds.name = d.value("name", df.parent_path().filename().string());
      auto collect = [&](const char* key, std::vector<std::string>& out) {
        if (!d.contains(key)) return;
        for (const auto& g : d[key]) {
          auto files = expand_glob(g.get<std::string>(), base);
          out.insert(out.end(), files.begin(), files.end());
        }
      };
      collect("train", ds.train);
      collect("test", ds.test);
      cfg.domains.push_back(std::move(ds));
    }
    if (j.contains("supports")) cfg.supports = j["supports"].get<std::vector<double>>();
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    if (j.contains("memory_mb")) cfg.memory_bytes = j["memory_mb"].get<std::size_t>() << 20;
    if (j.contains("node_budget") && !j["node_budget"].is_null()) cfg.node_budget = j["node_budget"].get<std::size_t>();
    if (j.contains("heuristic")) {
      auto h = parse_heuristic(j["heuristic"].get<std::string>());
      if (!h) throw ManifestError("manifest: unknown heuristic");
      cfg.heuristic = *h;
    }
    cfg.min_length = j.value("min_len", cfg.min_length);
    if (j.contains("max_len") && !j["max_len"].is_null()) cfg.max_length = j["max_len"].get<std::size_t>();
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.record_macro_intermediates = j.value("record_macro_intermediates", false);
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("manifest: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

struct RunRecord {
  std::string domain;
  std::string problem;
  std::string config;  // "baseline" or supportNN label
  SearchStatus status = SearchStatus::unsolvable;
  double wall_time_s = 0.0;
  std::optional<int> cost;
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t macro_applications = 0;
  std::size_t library_size = 0;

  bool solved() const noexcept { return status == SearchStatus::solved; }
};

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j{{"domain", r.domain},
                   {"problem", r.problem},
                   {"config", r.config},
                   {"status", std::string(to_string(r.status))},
                   {"wall_time_s", r.wall_time_s},
                   {"expanded", r.expanded},
                   {"generated", r.generated},
                   {"macro_applications", r.macro_applications},
                   {"library_size", r.library_size}};
  j["cost"] = r.cost ? nlohmann::json(*r.cost) : nlohmann::json(nullptr);
  return j;
}

struct ProblemScores {
  std::string problem;
  std::map<std::string, double> time;
  std::map<std::string, double> quality;
};

struct ConfigAggregate {
  std::string config;
  std::size_t solved = 0;
  double time_sum = 0.0;
  double quality_sum = 0.0;
  double time_mean = 0.0;
  double quality_mean = 0.0;
  // Headline improvements use the sums.
  std::optional<double> time_improvement;
  std::optional<double> quality_improvement;
  std::optional<double> time_improvement_mean;
  std::optional<double> quality_improvement_mean;
  double median_expanded = 0.0;
};

struct DomainScores {
  std::string domain;
  std::vector<ProblemScores> problems;
  std::vector<ConfigAggregate> configs;  // baseline first

  const ConfigAggregate* find(std::string_view config) const {
    for (const auto& c : configs)
      if (c.config == config) return &c;
    return nullptr;
  }
};

struct ScoreTable {
  std::vector<std::string> configs;  // baseline first, then support labels
  std::vector<DomainScores> domains;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// T* and Q* are the best values among the compared configurations.
inline ScoreTable compute_scores(const std::vector<RunRecord>& records, const std::vector<std::string>& configs) {
  ScoreTable table;
  table.configs = configs;
  std::map<std::string, std::map<std::string, std::map<std::string, const RunRecord*>>> by;
  for (const auto& r : records) by[r.domain][r.problem][r.config] = &r;

  for (const auto& [domain, problems] : by) {
    DomainScores ds;
    ds.domain = domain;
    std::map<std::string, std::vector<double>> expansions;
    for (const auto& [problem, runs] : problems) {
      ProblemScores ps;
      ps.problem = problem;
      std::optional<double> t_best, q_best;
      for (const auto& [cfg, r] : runs) {
        if (!r->solved()) continue;
        t_best = std::min(t_best.value_or(r->wall_time_s), r->wall_time_s);
        double q = *r->cost;
        q_best = std::min(q_best.value_or(q), q);
      }
      for (const auto& cfg : configs) {
        auto it = runs.find(cfg);
        const RunRecord* r = it == runs.end() ? nullptr : it->second;
        bool solved = r && r->solved();
        ps.time[cfg] = solved ? time_score(*t_best, r->wall_time_s, true) : 0.0;
        ps.quality[cfg] = solved ? quality_score(*q_best, *r->cost, true) : 0.0;
        if (r) expansions[cfg].push_back(static_cast<double>(r->expanded));
      }
      ds.problems.push_back(std::move(ps));
    }
    const double n = static_cast<double>(ds.problems.size());
    for (const auto& cfg : configs) {
      ConfigAggregate agg;
      agg.config = cfg;
      for (const auto& ps : ds.problems) {
        agg.time_sum += ps.time.at(cfg);
        agg.quality_sum += ps.quality.at(cfg);
        auto it = problems.at(ps.problem).find(cfg);
        if (it != problems.at(ps.problem).end() && it->second->solved()) ++agg.solved;
      }
      agg.time_mean = n > 0 ? agg.time_sum / n : 0.0;
      agg.quality_mean = n > 0 ? agg.quality_sum / n : 0.0;
      agg.median_expanded = median(expansions[cfg]);
      ds.configs.push_back(agg);
    }
    const ConfigAggregate base = ds.configs.front();
    for (auto& agg : ds.configs) {
      agg.time_improvement = improvement(base.time_sum, agg.time_sum);
      agg.quality_improvement = improvement(base.quality_sum, agg.quality_sum);
      agg.time_improvement_mean = improvement(base.time_mean, agg.time_mean);
      agg.quality_improvement_mean = improvement(base.quality_mean, agg.quality_mean);
    }
    table.domains.push_back(std::move(ds));
  }
  return table;
}

// Rows are domains; columns are time then quality improvement per support.
inline std::string format_csv(const ScoreTable& t) {
  std::ostringstream os;
  os << "domain";
  for (const char* metric : {"time", "quality"})
    for (std::size_t i = 1; i < t.configs.size(); ++i) os << ',' << metric << '_' << t.configs[i];
  os << '\n';
  for (const auto& d : t.domains) {
    os << d.domain;
    for (std::size_t i = 1; i < d.configs.size(); ++i) os << ',' << format_improvement(d.configs[i].time_improvement);
    for (std::size_t i = 1; i < d.configs.size(); ++i)
      os << ',' << format_improvement(d.configs[i].quality_improvement);
    os << '\n';
  }
  return os.str();
}

inline std::string format_problem_csv(const ScoreTable& t) {
  std::ostringstream os;
  os << "domain,problem";
  for (const auto& c : t.configs) os << ",time_" << c;
  for (const auto& c : t.configs) os << ",quality_" << c;
  os << '\n' << std::setprecision(6);
  for (const auto& d : t.domains)
    for (const auto& p : d.problems) {
      os << d.domain << ',' << p.problem;
      for (const auto& c : t.configs) os << ',' << p.time.at(c);
      for (const auto& c : t.configs) os << ',' << p.quality.at(c);
      os << '\n';
    }
  return os.str();
}

inline std::string format_summary(const ScoreTable& t) {
  std::ostringstream os;
  os << "Improvement over baseline (headline: sum of per-problem scores; mean shown in brackets)\n";
  for (const auto& d : t.domains) {
    os << "\n" << d.domain << " (" << d.problems.size() << " test problems)\n";
    os << std::left << std::setw(10) << "config" << std::setw(8) << "solved" << std::setw(12) << "time_sum"
       << std::setw(12) << "qual_sum" << std::setw(12) << "med_exp" << std::setw(22) << "time_impr%"
       << "quality_impr%\n";
    for (const auto& c : d.configs) {
      std::ostringstream ti, qi;
      ti << format_improvement(c.time_improvement) << " [" << format_improvement(c.time_improvement_mean) << "]";
      qi << format_improvement(c.quality_improvement) << " [" << format_improvement(c.quality_improvement_mean) << "]";
      os << std::left << std::setw(10) << c.config << std::setw(8) << c.solved << std::setw(12) << std::fixed
         << std::setprecision(3) << c.time_sum << std::setw(12) << c.quality_sum << std::setw(12)
         << std::setprecision(1) << c.median_expanded << std::setw(22) << ti.str() << qi.str() << "\n";
    }
  }
  return os.str();
}

struct ExperimentResult {
  std::vector<RunRecord> records;
  ScoreTable table;
  std::map<std::string, std::size_t> corpus_sizes;
};

namespace detail {

inline RunRecord make_record(const std::string& domain, const std::string& problem, const std::string& config,
                             const SearchResult& r, std::size_t library_size) {
  RunRecord rec;
  rec.domain = domain;
  rec.problem = problem;
  rec.config = config;
  rec.status = r.status;
  rec.wall_time_s = r.wall_time_s;
  if (r.plan) rec.cost = r.plan->cost;
  rec.expanded = r.expanded;
  rec.generated = r.generated;
  rec.macro_applications = r.macro_applications;
  rec.library_size = library_size;
  return rec;
}

inline std::string problem_id(const std::string& path) { return fs::path(path).filename().string(); }

template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Runs the full protocol. If `runs_log` is given, each RunRecord is appended
// to it as a JSON line as soon as it is produced.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* runs_log = nullptr,
                                       std::ostream* progress = nullptr) {
  cfg.validate();
  ExperimentResult result;
  std::vector<std::string> configs{"baseline"};
  for (double s : cfg.supports) configs.push_back(support_label(s));
  std::mutex sink;
  auto emit = [&](RunRecord rec) {
    std::lock_guard lock(sink);
    if (runs_log) *runs_log << to_json(rec).dump() << '\n' << std::flush;
    result.records.push_back(std::move(rec));
  };

  for (const auto& ds : cfg.domains) {
    if (ds.test.empty()) continue;
    const Domain domain = parse_domain(read_text_file(ds.domain_file));
    SearchConfig base_cfg = cfg.search_config();

    // Training corpus: baseline plans, unsolved and empty plans excluded.
    std::vector<std::optional<Plan>> train_plans(ds.train.size());
    detail::parallel_for(ds.train.size(), cfg.jobs, [&](std::size_t i) {
      Problem p = parse_problem(read_text_file(ds.train[i]), domain);
      GroundTask task = ground(domain, p);
      auto r = astar(task, base_cfg);
      if (r.plan && !r.plan->steps.empty()) train_plans[i] = std::move(r.plan);
    });
    std::vector<Plan> corpus;
    for (auto& p : train_plans)
      if (p) corpus.push_back(std::move(*p));
    result.corpus_sizes[ds.name] = corpus.size();
    if (progress) *progress << ds.name << ": corpus of " << corpus.size() << "/" << ds.train.size() << " plans\n";

    std::optional<SequenceDatabase> db;
    std::vector<std::vector<Pattern>> patterns(cfg.supports.size());
    std::vector<MinerConfig> miner_cfgs;
    for (double s : cfg.supports) {
      MinerConfig mc;
      mc.threshold = RelativeSupport{s};
      mc.min_length = cfg.min_length;
      mc.max_length = cfg.max_length;
      miner_cfgs.push_back(mc);
    }
    if (!corpus.empty()) {
      db = corpus_database(corpus);
      for (std::size_t k = 0; k < cfg.supports.size(); ++k) patterns[k] = mine_closed(*db, miner_cfgs[k]);
    }

    std::vector<std::size_t> order(ds.test.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), std::mt19937_64(cfg.seed));

    detail::parallel_for(order.size(), cfg.jobs, [&](std::size_t idx) {
      const std::string& path = ds.test[order[idx]];
      const std::string pid = detail::problem_id(path);
      Problem p = parse_problem(read_text_file(path), domain);
      GroundTask task = ground(domain, p);
      emit(detail::make_record(ds.name, pid, "baseline", astar(task, base_cfg), 0));
      for (std::size_t k = 0; k < cfg.supports.size(); ++k) {
        MacroLibrary lib;
        if (db) lib = build_library(*db, patterns[k], miner_cfgs[k], task);
        SearchConfig sc = base_cfg;
        sc.macro_library = &lib;
        emit(detail::make_record(ds.name, pid, configs[k + 1], search_with_macros(task, sc), lib.size()));
      }
    });
  }

  std::map<std::string, std::size_t> rank;
  for (std::size_t i = 0; i < configs.size(); ++i) rank[configs[i]] = i;
  std::sort(result.records.begin(), result.records.end(), [&](const RunRecord& a, const RunRecord& b) {
    if (a.domain != b.domain) return a.domain < b.domain;
    if (a.problem != b.problem) return a.problem < b.problem;
    return rank[a.config] < rank[b.config];
  });
  result.table = compute_scores(result.records, configs);
  return result;
}

// Writes runs.jsonl, scores.csv, problem_scores.csv and summary.txt.
inline void write_outputs(const ExperimentResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream runs(dir / "runs.jsonl");
  for (const auto& rec : r.records) runs << to_json(rec).dump() << '\n';
  write_text_file((dir / "scores.csv").string(), format_csv(r.table));
  write_text_file((dir / "problem_scores.csv").string(), format_problem_csv(r.table));
  write_text_file((dir / "summary.txt").string(), format_summary(r.table));
}

}  // namespace macroplan::bench
