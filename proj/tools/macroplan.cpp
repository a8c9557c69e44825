// macroplan: solve, learn, mine, bench, validate.
//
// Exit codes: 0 success/solved/valid, 1 unsolvable/invalid plan,
// 2 timeout or memory-out, 3 usage, parse or I/O error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macroplan/macroplan.hpp"

namespace fs = std::filesystem;
using namespace macroplan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitBudget = 2;
constexpr int kExitError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Plan> read_corpus(const std::string& dir) {
  if (!fs::is_directory(dir)) throw UsageError("corpus directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename().string()[0] != '.') files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Plan> corpus;
  for (const auto& f : files) corpus.push_back(parse_plan(read_text_file(f.string())));
  return corpus;
}

MinerConfig miner_config(double support, std::size_t min_len, std::optional<std::size_t> max_len) {
  if (!(support > 0.0 && support <= 1.0)) throw UsageError("--support must be in (0, 1]");
  MinerConfig cfg;
  cfg.threshold = RelativeSupport{support};
  cfg.min_length = min_len;
  cfg.max_length = max_len;
  cfg.validate();
  return cfg;
}

GroundTask load_task(const std::string& domain_path, const std::string& problem_path, Domain* domain_out = nullptr) {
  auto located = [](const std::string& path, auto&& parse) {
    try {
      return parse(read_text_file(path));
    } catch (const ParseError& e) {
      throw std::runtime_error(path + ":" + e.what());
    } catch (const UnsupportedFeature& e) {
      throw std::runtime_error(path + ":" + e.what());
    }
  };
  Domain d = located(domain_path, [](const std::string& text) { return parse_domain(text); });
  Problem p = located(problem_path, [&](const std::string& text) { return parse_problem(text, d); });
  GroundTask t = ground(d, p);
  if (domain_out) *domain_out = std::move(d);
  return t;
}

struct SolveOptions {
  std::string domain, problem;
  std::string heuristic = "ff";
  double timeout = 300.0;
  std::optional<std::string> macros;
  std::optional<std::size_t> node_budget;
  std::size_t memory_mb = 8192;
  std::string out = ".";
};

int cmd_solve(const SolveOptions& o) {
  auto h = parse_heuristic(o.heuristic);
  if (!h) throw UsageError("unknown heuristic " + o.heuristic);
  if (!(o.timeout > 0)) throw UsageError("--timeout must be positive");
  GroundTask task = load_task(o.domain, o.problem);

  SearchConfig cfg;
  cfg.heuristic = *h;
  cfg.timeout_s = o.timeout;
  cfg.node_budget = o.node_budget;
  cfg.memory_bytes = o.memory_mb << 20;
  MacroLibrary lib;
  SearchResult res;
  if (o.macros) {
    lib = load_library(read_text_file(*o.macros), task);
    cfg.macro_library = &lib;
    res = search_with_macros(task, cfg);
  } else {
    res = astar(task, cfg);
  }

  fs::create_directories(o.out);
  const std::string stem = fs::path(o.problem).stem().string();
  auto record = run_record_json(res, *h);
  if (o.macros) record["macros_loaded"] = lib.size();
  write_text_file((fs::path(o.out) / (stem + ".json")).string(), record.dump(2) + "\n");
  std::cout << record.dump() << "\n";

  switch (res.status) {
    case SearchStatus::solved:
      write_text_file((fs::path(o.out) / (stem + ".plan")).string(), format_plan(*res.plan));
      return kExitOk;
    case SearchStatus::unsolvable:
      std::cerr << "no plan exists\n";
      return kExitUnsolved;
    default:
      std::cerr << "search stopped: " << to_string(res.status) << "\n";
      return kExitBudget;
  }
}

struct LearnOptions {
  std::string domain, problem, corpus;
  double support = 0.10;
  std::size_t min_len = 2;
  std::optional<std::size_t> max_len;
  std::string out = ".";
};

int cmd_learn(const LearnOptions& o) {
  MinerConfig mc = miner_config(o.support, o.min_len, o.max_len);
  GroundTask task = load_task(o.domain, o.problem);
  auto corpus = read_corpus(o.corpus);
  MacroLibrary lib = learn_macros(corpus, mc, task, o.corpus);

  fs::create_directories(o.out);
  write_text_file((fs::path(o.out) / "macros.txt").string(), format_library(lib));
  const auto& r = lib.report;
  nlohmann::json report{{"corpus", o.corpus},
                        {"corpus_size", r.corpus_size},
                        {"support", o.support},
                        {"sigma", r.sigma},
                        {"mined", r.mined},
                        {"kept", r.kept},
                        {"dropped_unresolved", r.dropped_unresolved},
                        {"dropped_too_short", r.dropped_too_short},
                        {"dropped_pct", r.mined ? 100.0 * static_cast<double>(r.dropped()) / r.mined : 0.0}};
  write_text_file((fs::path(o.out) / "learn_report.json").string(), report.dump(2) + "\n");
  std::cout << report.dump() << "\n";
  return kExitOk;
}

struct MineOptions {
  std::optional<std::string> corpus;
  std::optional<std::string> spmf_in;
  std::optional<std::string> spmf_out;
  double support = 0.10;
  std::size_t min_len = 1;
  std::optional<std::size_t> max_len;
};

int cmd_mine(const MineOptions& o) {
  MinerConfig mc = miner_config(o.support, o.min_len, o.max_len);
  SequenceDatabase db;
  if (o.spmf_in) {
    db = from_spmf(read_text_file(*o.spmf_in));
  } else if (o.corpus) {
    db = corpus_database(read_corpus(*o.corpus));
  } else {
    throw UsageError("mine needs a corpus directory or --spmf-in");
  }
  if (o.spmf_out) write_text_file(*o.spmf_out, to_spmf(db));
  for (const auto& p : mine_closed(db, mc)) {
    std::cout << p.support << '\t';
    auto names = db.decode(p.items);
    for (std::size_t i = 0; i < names.size(); ++i) std::cout << (i ? " " : "") << names[i];
    std::cout << '\n';
  }
  return kExitOk;
}

struct BenchOptions {
  std::string manifest;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> timeout;
  std::string out = "bench-out";
};

int cmd_bench(const BenchOptions& o) {
  auto base = fs::path(o.manifest).parent_path();
  auto cfg = bench::parse_manifest(read_text_file(o.manifest), base.empty() ? fs::path(".") : base);
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.seed) cfg.seed = *o.seed;
  if (o.timeout) cfg.timeout_s = *o.timeout;
  cfg.validate();
  fs::create_directories(o.out);
  std::ofstream log(fs::path(o.out) / "runs.partial.jsonl");
  auto result = bench::run_experiment(cfg, &log, &std::cerr);
  log.close();
  bench::write_outputs(result, o.out);
  fs::remove(fs::path(o.out) / "runs.partial.jsonl");
  std::cout << bench::format_summary(result.table);
  return kExitOk;
}

int cmd_validate(const std::string& domain, const std::string& problem, const std::string& plan_path) {
  GroundTask task = load_task(domain, problem);
  Plan plan = parse_plan(read_text_file(plan_path));
  bool valid = false;
  try {
    valid = validate_plan(task, plan);
  } catch (const UnknownAction& e) {
    std::cout << "invalid plan: " << e.what() << "\n";
    return kExitUnsolved;
  }
  if (valid) {
    std::cout << "valid plan, cost " << plan.cost << "\n";
    return kExitOk;
  }
  std::cout << "invalid plan\n";
  return kExitUnsolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macro-action learning and A* planning for STRIPS"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Solve a problem with A*, optionally with a macro library");
  s->add_option("domain", solve.domain, "PDDL domain file")->required();
  s->add_option("problem", solve.problem, "PDDL problem file")->required();
  s->add_option("--heuristic", solve.heuristic, "ff, hadd, hmax or blind")
      ->check(CLI::IsMember({"ff", "hadd", "hmax", "blind"}))
      ->capture_default_str();
  s->add_option("--timeout", solve.timeout, "Time limit in seconds")->capture_default_str();
  s->add_option("--macros", solve.macros, "Macro library file");
  s->add_option("--node-budget", solve.node_budget, "Generated-node cap (default derived from --memory-mb)");
  s->add_option("--memory-mb", solve.memory_mb, "Memory budget used to derive the node cap")->capture_default_str();
  s->add_option("--out", solve.out, "Output directory for <problem>.plan and <problem>.json")->capture_default_str();

  LearnOptions learn;
  auto* l = app.add_subcommand("learn", "Learn a macro library for a problem from a plan corpus");
  l->add_option("domain", learn.domain, "PDDL domain file")->required();
  l->add_option("problem", learn.problem, "Target PDDL problem file")->required();
  l->add_option("corpus", learn.corpus, "Directory of plan files")->required();
  l->add_option("--support", learn.support, "Relative support threshold in (0, 1]")->capture_default_str();
  l->add_option("--min-len", learn.min_len, "Minimum pattern length")->capture_default_str();
  l->add_option("--max-len", learn.max_len, "Maximum pattern length");
  l->add_option("--out", learn.out, "Output directory for macros.txt and learn_report.json")->capture_default_str();

  MineOptions mine;
  auto* m = app.add_subcommand("mine", "Print closed sequential patterns of a plan corpus");
  m->add_option("corpus", mine.corpus, "Directory of plan files");
  m->add_option("--spmf-in", mine.spmf_in, "Read sequences from an SPMF file instead");
  m->add_option("--spmf-out", mine.spmf_out, "Also export the database in SPMF format");
  m->add_option("--support", mine.support, "Relative support threshold in (0, 1]")->capture_default_str();
  m->add_option("--min-len", mine.min_len, "Minimum pattern length")->capture_default_str();
  m->add_option("--max-len", mine.max_len, "Maximum pattern length");

  BenchOptions bench_opts;
  auto* b = app.add_subcommand("bench", "Run a benchmark manifest and score it");
  b->add_option("manifest", bench_opts.manifest, "Experiment manifest (JSON)")->required();
  b->add_option("--jobs", bench_opts.jobs, "Parallel worker slots");
  b->add_option("--seed", bench_opts.seed, "Seed for problem ordering");
  b->add_option("--timeout", bench_opts.timeout, "Override per-run time limit in seconds");
  b->add_option("--out", bench_opts.out, "Output directory")->capture_default_str();

  std::string v_domain, v_problem, v_plan;
  auto* v = app.add_subcommand("validate", "Check a plan file against a problem");
  v->add_option("domain", v_domain, "PDDL domain file")->required();
  v->add_option("problem", v_problem, "PDDL problem file")->required();
  v->add_option("plan", v_plan, "Plan file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*l) return cmd_learn(learn);
    if (*m) return cmd_mine(mine);
    if (*b) return cmd_bench(bench_opts);
    if (*v) return cmd_validate(v_domain, v_problem, v_plan);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
