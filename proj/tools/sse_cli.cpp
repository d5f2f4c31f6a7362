// sse: run, sweep, treesim and compare front end.
//
// Exit codes: 0 clean or PASS, 1 check FAIL, 2 bugs found, 3 solver
// exception, 64 usage, 65 parse error, 66 unreadable input, 74 write error.

#include "sse/fixture.hpp"
#include "sse/lang.hpp"
#include "sse/parallel.hpp"
#include "sse/report.hpp"
#include "sse/search.hpp"
#include "sse/solver.hpp"
#include "sse/treesim.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <omp.h>

using namespace sse;

namespace {

enum Exit {
  kClean = 0,
  kFail = 1,
  kBugs = 2,
  kSolverException = 3,
  kUsage = 64,
  kParse = 65,
  kNoInput = 66,
  kWrite = 74,
};

struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string &msg) { throw ExitError{code, msg}; }

struct Loaded {
  Program program;
  Code code;
  std::string name;
};

Loaded load(const std::string &path) {
  if (!std::filesystem::exists(path))
    fail(kNoInput, "cannot open program file '" + path + "'");
  Loaded l;
  try {
    l.program = load_program(path);
  } catch (const ParseError &e) {
    fail(kParse, path + ":" + e.what());
  } catch (const std::exception &e) {
    fail(kNoInput, e.what());
  }
  l.code = lower(l.program);
  l.name = std::filesystem::path(path).stem().string();
  return l;
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out || !(out << text))
    fail(kWrite, "cannot write '" + path + "'");
}

SolverFactory factory_for(const std::string &spec) {
  try {
    make_solver(spec);
  } catch (const std::invalid_argument &e) {
    fail(kUsage, e.what());
  }
  return [spec] { return make_solver(spec); };
}

// Options shared by run, sweep and compare.
struct EngineFlags {
  std::string program;
  std::string order = "false-first";
  bool optimize = false;
  bool no_optimize = false;
  bool no_recheck = false;
  int loop_bound = 8;
  std::string solver = "builtin";
  std::string json_out;
  std::string csv_out;
  std::uint64_t seed = 0;
};

void add_engine_flags(CLI::App *cmd, EngineFlags &f) {
  cmd->add_option("program", f.program, "program file (.sx)")->required();
  cmd->add_option("--order", f.order, "false-first | true-first")
      ->check(CLI::IsMember({"false-first", "true-first"}));
  cmd->add_flag("--optimize", f.optimize, "enable the absurdity optimization");
  cmd->add_flag("--no-optimize", f.no_optimize, "disable the absurdity optimization");
  cmd->add_flag("--no-recheck", f.no_recheck,
                "report speculative bugs without a reachability check (debug)");
  cmd->add_option("--loop-bound", f.loop_bound, "loop iterations per path")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver", f.solver, "builtin | external:<command>");
  cmd->add_option("--json", f.json_out, "write a JSON report");
  cmd->add_option("--csv", f.csv_out, "write a CSV table");
  cmd->add_option("--seed", f.seed, "seed (recorded; runs are deterministic)");
}

SearchConfig base_config(const EngineFlags &f) {
  SearchConfig c;
  c.order = parse_order(f.order);
  c.optimize = f.optimize && !f.no_optimize;
  c.recheck = !f.no_recheck;
  c.loop_bound = f.loop_bound;
  return c;
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

//===----------------------------------------------------------------------===//
// run
//===----------------------------------------------------------------------===//

struct RunFlags {
  EngineFlags e;
  std::string strategy = "sse";
  int depth = 3;
  std::string baseline;
};

RunReport timed_run(const Loaded &l, const SearchConfig &cfg, const std::string &solver_spec,
                    Solver &solver) {
  auto t0 = std::chrono::steady_clock::now();
  ExplorationRecord rec;
  std::string error;
  try {
    rec = run_search(l.code, cfg, solver);
  } catch (const SearchAborted &a) {
    rec = a.partial;
    error = a.what();
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunReport r = make_report(rec, cfg, l.name, solver_spec, wall);
  if (!error.empty()) {
    r.status = "solver-exception";
    r.error = error;
  }
  return r;
}

int cmd_run(const RunFlags &f) {
  Loaded l = load(f.e.program);
  SearchConfig cfg = base_config(f.e);
  cfg.strategy = parse_strategy(f.strategy);
  cfg.depth = cfg.strategy == Strategy::Pure ? 1 : f.depth;
  auto make = factory_for(f.e.solver);

  auto solver = make();
  RunReport r = timed_run(l, cfg, f.e.solver, *solver);
  if (!f.baseline.empty()) {
    SearchConfig bc = cfg;
    bc.strategy = parse_strategy(f.baseline);
    bc.depth = bc.strategy == Strategy::Pure ? 1 : f.depth;
    auto bs = make();
    RunReport base = timed_run(l, bc, f.e.solver, *bs);
    attach_savings(r, base, std::string(to_string(bc.strategy)));
  }

  std::cout << l.name << ": " << to_string(cfg.strategy);
  if (cfg.strategy == Strategy::Speculative)
    std::cout << " k=" << cfg.depth;
  std::cout << " " << to_string(cfg.order) << (cfg.optimize ? " optimize" : "")
            << (cfg.recheck ? "" : " no-recheck") << "\n";
  std::cout << "  solver calls " << r.stats.total << " (sat " << r.stats.sat << ", unsat "
            << r.stats.unsat << ", avoided " << r.stats.avoided << ", exceptions "
            << r.stats.exceptions << ")\n";
  std::cout << "  leaves " << r.leaves << ", pruned " << r.pruned << ", instructions "
            << r.executed << "\n";
  for (const BugReport &b : r.bugs)
    std::cout << "  bug line " << b.line << ": " << b.message
              << (b.verified ? "" : " [unverified]") << "\n";
  if (r.savings)
    std::cout << "  vs " << r.savings->baseline << ": " << percent(r.savings->calls_percent)
              << "% fewer calls, " << r.savings->extra_instructions
              << " extra instructions\n";
  if (!r.error.empty())
    std::cerr << "sse: solver exception: " << r.error << "\n";

  if (!f.e.json_out.empty())
    write_file(f.e.json_out, to_json(r).dump(2) + "\n");
  if (!f.e.csv_out.empty()) {
    SweepRow row;
    row.depth = cfg.depth;
    row.order = cfg.order;
    row.optimize = cfg.optimize;
    row.total = r.stats.total;
    row.sat = r.stats.sat;
    row.unsat = r.stats.unsat;
    row.avoided = r.stats.avoided;
    row.bugs = r.bugs.size();
    write_file(f.e.csv_out, to_csv({row}));
  }
  if (r.status == "solver-exception")
    return kSolverException;
  return r.bugs.empty() ? kClean : kBugs;
}

//===----------------------------------------------------------------------===//
// sweep
//===----------------------------------------------------------------------===//

struct SweepFlags {
  EngineFlags e;
  int min_depth = 1;
  int max_depth = 0; // 0: longest path
  std::vector<std::string> orders;
  std::string optimize_variants = "off";
  bool serial = false;
};

int longest_or_one(const Loaded &l, int loop_bound) {
  return std::max(1, longest_path_branch_count(l.program, loop_bound));
}

std::vector<int> depth_range(int lo, int hi, int longest) {
  if (hi == 0)
    hi = longest;
  if (lo < 1 || hi < lo || hi > longest)
    fail(kUsage, "depth range " + std::to_string(lo) + ".." + std::to_string(hi) +
                     " must lie within 1.." + std::to_string(longest));
  std::vector<int> out;
  for (int k = lo; k <= hi; ++k)
    out.push_back(k);
  return out;
}

std::vector<bool> optimize_variants(const std::string &s) {
  if (s == "off")
    return {false};
  if (s == "on")
    return {true};
  return {false, true};
}

int cmd_sweep(const SweepFlags &f) {
  Loaded l = load(f.e.program);
  SweepSpec spec;
  spec.depths = depth_range(f.min_depth, f.max_depth, longest_or_one(l, f.e.loop_bound));
  for (const std::string &o : f.orders.empty() ? std::vector<std::string>{f.e.order} : f.orders)
    spec.orders.push_back(parse_order(o));
  spec.optimize = optimize_variants(f.optimize_variants);
  spec.recheck = !f.e.no_recheck;
  spec.loop_bound = f.e.loop_bound;
  auto make = factory_for(f.e.solver);

  std::vector<SweepRow> rows;
  try {
    rows = f.serial ? sweep_serial(l.code, spec, make) : sweep_parallel(l.code, spec, make);
  } catch (const SearchAborted &a) {
    std::cerr << "sse: solver exception: " << a.what() << "\n";
    return kSolverException;
  }

  std::cout << "k  order        opt  calls  sat  unsat  avoided  bugs  pure  %pure    "
               "%plain\n";
  for (const SweepRow &r : rows)
    std::cout << std::left << std::setw(3) << r.depth << std::setw(13) << to_string(r.order)
              << std::setw(5) << (r.optimize ? "on" : "off") << std::setw(7) << r.total
              << std::setw(5) << r.sat << std::setw(7) << r.unsat << std::setw(9) << r.avoided
              << std::setw(6) << r.bugs << std::setw(6) << r.pure_total << std::setw(9)
              << percent(r.percent) << percent(r.percent_plain) << std::right << "\n";
  if (!f.e.json_out.empty()) {
    Json j;
    j["program"] = l.name;
    j["solver"] = f.e.solver;
    j["rows"] = to_json(rows);
    write_file(f.e.json_out, j.dump(2) + "\n");
  }
  if (!f.e.csv_out.empty())
    write_file(f.e.csv_out, to_csv(rows));
  return kClean;
}

//===----------------------------------------------------------------------===//
// treesim
//===----------------------------------------------------------------------===//

struct TreesimFlags {
  std::string replay_name = "all";
  std::string fixture_dir = SSE_FIXTURE_DIR;
  std::size_t count = 10000;
  std::uint64_t seed = 7;
  int max_height = 12;
  int max_depth = 12;
  std::vector<double> ps = {0, 0.1, 0.25, 0.42};
  int grid_n = 12;
  int grid_k = 12;
  std::string json_out;
};

int cmd_replay(const TreesimFlags &f) {
  std::vector<std::string> names;
  if (f.replay_name == "all")
    names = fixture_names();
  else
    names.push_back(f.replay_name);
  int passed = 0;
  Json out = Json::array();
  for (const std::string &n : names) {
    ReplayOutcome o;
    try {
      o = replay_fixture(n, f.fixture_dir);
    } catch (const FixtureError &e) {
      fail(kUsage, e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << n << ": " << o.result.total << " calls ("
              << o.result.sat << " sat, " << o.result.unsat << " unsat, " << o.result.avoided
              << " avoided)";
    if (!o.pass)
      std::cout << "; " << o.first_difference;
    std::cout << "\n";
    passed += o.pass;
    Json j;
    j["fixture"] = n;
    j["pass"] = o.pass;
    j["total"] = o.result.total;
    if (!o.pass)
      j["first_difference"] = o.first_difference;
    out.push_back(j);
  }
  std::cout << passed << "/" << names.size() << " fixtures pass\n";
  if (!f.json_out.empty())
    write_file(f.json_out, out.dump(2) + "\n");
  return passed == static_cast<int>(names.size()) ? kClean : kFail;
}

int cmd_random(const TreesimFlags &f) {
  if (f.max_height < 1 || f.max_depth < 1)
    fail(kUsage, "heights and depths must be positive");
  for (double p : f.ps)
    if (p < 0 || p >= 1)
      fail(kUsage, "probabilities must lie in [0, 1)");
  auto cases = make_tree_cases(f.count, f.max_height, f.ps, f.seed);
  RatioSummary s = ratio_batch_parallel(cases, f.max_depth);
  bool pass = s.violations == 0;
  std::cout << (pass ? "PASS" : "FAIL") << " " << s.comparisons << " comparisons over "
            << cases.size() << " trees, min ratio " << std::setprecision(6) << s.min_ratio
            << " (height " << s.worst.height << ", p " << s.worst.p << ", seed "
            << s.worst.seed << ", k " << s.worst_depth << ", " << to_string(s.worst_order)
            << "), " << s.violations << " at or below one half\n";
  if (!f.json_out.empty()) {
    Json j;
    j["trees"] = cases.size();
    j["comparisons"] = s.comparisons;
    j["violations"] = s.violations;
    j["min_ratio"] = s.min_ratio;
    j["worst"] = {{"height", s.worst.height}, {"p", s.worst.p}, {"seed", s.worst.seed},
                  {"depth", s.worst_depth},
                  {"order", std::string(to_string(s.worst_order))}};
    write_file(f.json_out, j.dump(2) + "\n");
  }
  return pass ? kClean : kFail;
}

int cmd_eq1(const TreesimFlags &f) {
  if (f.grid_n < 1 || f.grid_n > 30 || f.grid_k < 1)
    fail(kUsage, "grid needs 1 <= n <= 30 and k >= 1");
  auto grid = eq1_grid_parallel(f.grid_n, f.grid_k);
  std::size_t formula_ok = 0, corrected_ok = 0;
  Json cells = Json::array();
  for (const GridCell &c : grid) {
    formula_ok += c.simulated == c.formula;
    corrected_ok += c.simulated == c.corrected;
    if (c.simulated != c.formula) {
      std::cout << "  n=" << c.n << " k=" << c.k << ": simulated " << c.simulated
                << ", formula " << c.formula << "\n";
      cells.push_back({{"n", c.n}, {"k", c.k}, {"simulated", c.simulated},
                       {"formula", c.formula}});
    }
  }
  bool pass = formula_ok == grid.size();
  std::cout << (pass ? "PASS" : "FAIL") << " formula matches " << formula_ok << "/"
            << grid.size() << " cells; corrected form matches " << corrected_ok << "/"
            << grid.size() << "\n";
  if (!f.json_out.empty()) {
    Json j;
    j["cells"] = grid.size();
    j["formula_matches"] = formula_ok;
    j["corrected_matches"] = corrected_ok;
    j["mismatches"] = cells;
    write_file(f.json_out, j.dump(2) + "\n");
  }
  return pass ? kClean : kFail;
}

//===----------------------------------------------------------------------===//
// compare
//===----------------------------------------------------------------------===//

struct CompareFlags {
  EngineFlags e;
  std::vector<int> depths;
};

int cmd_compare(const CompareFlags &f) {
  Loaded l = load(f.e.program);
  int longest = longest_or_one(l, f.e.loop_bound);
  std::vector<int> depths = f.depths.empty() ? depth_range(1, 0, longest) : f.depths;
  for (int k : depths)
    if (k < 1)
      fail(kUsage, "depths must be positive");
  auto make = factory_for(f.e.solver);

  SearchConfig pc = base_config(f.e);
  pc.strategy = Strategy::Pure;
  pc.depth = 1;
  pc.optimize = false;
  ExplorationRecord pure;
  try {
    auto s = make();
    pure = run_pure_dfs(l.code, pc, *s);
  } catch (const SearchAborted &a) {
    std::cerr << "sse: solver exception: " << a.what() << "\n";
    return kSolverException;
  }

  std::size_t runs = 0;
  for (int k : depths)
    for (Order o : {Order::FalseFirst, Order::TrueFirst})
      for (bool opt : {false, true}) {
        SearchConfig c = base_config(f.e);
        c.strategy = Strategy::Speculative;
        c.depth = k;
        c.order = o;
        c.optimize = opt;
        ExplorationRecord rec;
        try {
          auto s = make();
          rec = run_speculative_dfs(l.code, c, *s);
        } catch (const SearchAborted &a) {
          std::cerr << "sse: solver exception: " << a.what() << "\n";
          return kSolverException;
        }
        ++runs;
        auto diff = compare_leaves(pure, rec);
        if (!diff && rec.bugs.size() != pure.bugs.size())
          diff = "bug count " + std::to_string(rec.bugs.size()) + ", pure found " +
                 std::to_string(pure.bugs.size());
        if (diff) {
          std::cout << "FAIL " << l.name << " k=" << k << " " << to_string(o)
                    << (opt ? " optimize" : "") << ": " << *diff << "\n";
          return kFail;
        }
      }
  std::cout << "PASS " << l.name << ": " << runs << " speculative runs match pure ("
            << leaf_multiset(pure).size() << " leaves, " << pure.bugs.size() << " bugs)\n";
  return kClean;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Speculative symbolic execution driver"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads for batch work (0: default)");

  RunFlags rf;
  auto *run = app.add_subcommand("run", "explore one program");
  add_engine_flags(run, rf.e);
  run->add_option("--strategy", rf.strategy, "pure | sse")
      ->check(CLI::IsMember({"pure", "sse", "speculative"}));
  run->add_option("--depth", rf.depth, "max speculation depth")->check(CLI::PositiveNumber);
  run->add_option("--baseline", rf.baseline, "also run this strategy and report savings")
      ->check(CLI::IsMember({"pure", "sse", "speculative"}));

  SweepFlags sf;
  auto *sweep = app.add_subcommand("sweep", "speculation depth sweep");
  add_engine_flags(sweep, sf.e);
  sweep->add_option("--min-depth", sf.min_depth, "first k");
  sweep->add_option("--max-depth", sf.max_depth, "last k (default: longest path)");
  sweep->add_option("--orders", sf.orders, "orders to sweep (default: --order)")
      ->check(CLI::IsMember({"false-first", "true-first"}));
  sweep->add_option("--optimize-variants", sf.optimize_variants, "off | on | both")
      ->check(CLI::IsMember({"off", "on", "both"}));
  sweep->add_flag("--serial", sf.serial, "run rows serially");

  TreesimFlags tf;
  auto *treesim = app.add_subcommand("treesim", "labeled-tree simulation");
  treesim->require_subcommand(1);
  treesim->add_option("--json", tf.json_out, "write a JSON summary");
  auto *replay = treesim->add_subcommand("replay", "replay worked-example fixtures");
  replay->add_option("name", tf.replay_name, "fixture name or all");
  replay->add_option("--dir", tf.fixture_dir, "fixture directory");
  auto *random = treesim->add_subcommand("random", "random-tree ratio property");
  random->add_option("--count", tf.count, "number of trees");
  random->add_option("--seed", tf.seed, "generator seed");
  random->add_option("--max-height", tf.max_height, "heights cycle 1..N");
  random->add_option("--max-depth", tf.max_depth, "k runs 1..N");
  random->add_option("--probabilities", tf.ps, "infeasibility probabilities");
  auto *eq1 = treesim->add_subcommand("eq1", "closed-form grid check on full trees");
  eq1->add_option("--max-n", tf.grid_n, "heights 1..N");
  eq1->add_option("--max-k", tf.grid_k, "depths 1..K");

  CompareFlags cf;
  auto *compare = app.add_subcommand("compare", "leaf equivalence against pure DFS");
  add_engine_flags(compare, cf.e);
  compare->add_option("--depths", cf.depths, "depths to check (default: 1..longest path)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }
  if (threads > 0)
    omp_set_num_threads(threads);

  try {
    if (*run)
      return cmd_run(rf);
    if (*sweep)
      return cmd_sweep(sf);
    if (*compare)
      return cmd_compare(cf);
    if (*replay)
      return cmd_replay(tf);
    if (*random)
      return cmd_random(tf);
    if (*eq1)
      return cmd_eq1(tf);
  } catch (const ExitError &e) {
    std::cerr << "sse: " << e.message << "\n";
    return e.code;
  } catch (const SolverException &e) {
    std::cerr << "sse: solver exception: " << e.what() << "\n";
    return kSolverException;
  } catch (const std::invalid_argument &e) {
    std::cerr << "sse: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
