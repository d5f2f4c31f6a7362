// Acceptance checks. `sse-acceptance` runs all of them and prints one
// PASS/FAIL line each; `sse-acceptance N` runs only criterion N.
#include "oracles.hpp"
#include "sse/lang.hpp"
#include "sse/parallel.hpp"
#include "sse/search.hpp"
#include "sse/solver.hpp"
#include "sse/treesim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace sse;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct Loaded {
  std::string name;
  Program program;
  Code code;
  int longest = 1;
};

Loaded load(const std::string &name) {
  Loaded l;
  l.name = name;
  l.program = load_program(std::string(SSE_CORPUS_DIR) + "/" + name + ".sx");
  l.code = lower(l.program);
  l.longest = std::max(1, longest_path_branch_count(l.program, 8));
  return l;
}

std::vector<Loaded> corpus() {
  std::vector<std::string> names;
  for (const auto &e : std::filesystem::directory_iterator(SSE_CORPUS_DIR))
    if (e.path().extension() == ".sx")
      names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  std::vector<Loaded> out;
  for (const auto &n : names)
    out.push_back(load(n));
  return out;
}

SearchConfig cfg(Strategy s, int k, Order o, bool opt, bool recheck = true) {
  SearchConfig c;
  c.strategy = s;
  c.depth = k;
  c.order = o;
  c.optimize = opt;
  c.recheck = recheck;
  return c;
}

ExplorationRecord run(const Code &code, const SearchConfig &c) {
  BuiltinSolver s;
  return run_search(code, c, s);
}

std::string label(const Loaded &l, const SearchConfig &c) {
  std::ostringstream os;
  os << l.name << " " << to_string(c.strategy) << " k=" << c.depth << " " << to_string(c.order)
     << (c.optimize ? " opt" : "") << (c.recheck ? "" : " no-recheck");
  return os.str();
}

// Appends a failure note; keeps the detail short.
void fail(Verdict &v, const std::string &why) {
  if (v.pass)
    v.detail = why;
  else if (v.detail.size() < 400)
    v.detail += "; " + why;
  v.pass = false;
}

void expect_count(Verdict &v, const std::string &what, std::uint64_t got, std::uint64_t want) {
  if (got != want)
    fail(v, what + " = " + std::to_string(got) + ", expected " + std::to_string(want));
}

int ceil_log2(int m) {
  int r = 0;
  while ((1 << r) < m)
    ++r;
  return r;
}

Verdict worked_example() {
  Verdict v;
  Loaded l = load("fig1");
  auto pure = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
  auto sse = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, false));
  expect_count(v, "pure", pure.stats.total, 14);
  expect_count(v, "sse k=3 false-first", sse.stats.total, 8);
  if (v.pass)
    v.detail = "pure 14, sse k=3 8";
  return v;
}

Verdict modified_example() {
  Verdict v;
  Loaded l = load("fig1_modified");
  auto pure = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
  auto ff = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, false));
  auto tf = run(l.code, cfg(Strategy::Speculative, 3, Order::TrueFirst, false));
  auto opt = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, true));
  expect_count(v, "pure", pure.stats.total, 14);
  expect_count(v, "false-first", ff.stats.total, 11);
  expect_count(v, "false-first sat", ff.stats.sat, 9);
  expect_count(v, "false-first unsat", ff.stats.unsat, 2);
  expect_count(v, "true-first", tf.stats.total, 8);
  expect_count(v, "optimized", opt.stats.total, 9);
  expect_count(v, "avoided", opt.stats.avoided, 2);
  if (v.pass)
    v.detail = "pure 14, false-first 11 (9/2), true-first 8, optimized 9 with 2 avoided";
  return v;
}

Verdict closed_form_grid() {
  Verdict v;
  int match = 0, corrected = 0;
  std::string cells;
  for (const GridCell &c : eq1_grid_parallel(12, 12)) {
    if (c.simulated == c.formula)
      ++match;
    else if (cells.size() < 120)
      cells += " (" + std::to_string(c.n) + "," + std::to_string(c.k) + ")";
    corrected += c.simulated == c.corrected;
  }
  std::ostringstream os;
  os << match << "/144 cells match the closed form; corrected form " << corrected << "/144";
  if (match != 144) {
    v.pass = false;
    os << "; off by one at" << cells << " ...";
  }
  v.detail = os.str();
  return v;
}

Verdict random_trees() {
  Verdict v;
  auto cases = make_tree_cases(10000, 12, {0.0, 0.1, 0.25, 0.42}, 7);
  RatioSummary s = ratio_batch_parallel(cases, 12);
  std::ostringstream os;
  os << s.comparisons << " comparisons, " << s.violations << " violations, min ratio "
     << s.min_ratio;
  v.pass = s.violations == 0 && s.comparisons == 10000u * 12 * 2;
  v.detail = os.str();
  return v;
}

Verdict leaf_equivalence() {
  Verdict v;
  int runs = 0;
  for (const Loaded &l : corpus()) {
    auto pure = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
    for (int k = 1; k <= l.longest; ++k)
      for (Order o : {Order::FalseFirst, Order::TrueFirst})
        for (bool opt : {false, true}) {
          SearchConfig c = cfg(Strategy::Speculative, k, o, opt);
          auto r = run(l.code, c);
          ++runs;
          if (auto d = compare_leaves(pure, r))
            fail(v, label(l, c) + ": " + *d);
          else if (r.bugs.size() != pure.bugs.size())
            fail(v, label(l, c) + ": bug count differs");
        }
  }
  if (v.pass)
    v.detail = std::to_string(runs) + " speculative runs have the same leaves as pure DFS";
  return v;
}

Verdict degeneration() {
  Verdict v;
  std::size_t queries = 0;
  for (const Loaded &l : corpus())
    for (Order o : {Order::FalseFirst, Order::TrueFirst}) {
      auto pure = run(l.code, cfg(Strategy::Pure, 1, o, false));
      auto spec = run(l.code, cfg(Strategy::Speculative, 1, o, false));
      bool same = pure.queries.size() == spec.queries.size();
      for (std::size_t i = 0; same && i < pure.queries.size(); ++i)
        same = pure.queries[i].constraints == spec.queries[i].constraints &&
               pure.queries[i].status == spec.queries[i].status;
      if (!same)
        fail(v, l.name + " " + std::string(to_string(o)) + ": query sequences differ");
      queries += pure.queries.size();
    }
  if (v.pass)
    v.detail = std::to_string(queries) + " queries identical in order and verdict";
  return v;
}

Verdict false_alarms() {
  Verdict v;
  Loaded l = load("fig6");
  int runs = 0;
  for (Strategy s : {Strategy::Pure, Strategy::Speculative})
    for (int k = 1; k <= l.longest; ++k)
      for (Order o : {Order::FalseFirst, Order::TrueFirst})
        for (bool opt : {false, true}) {
          SearchConfig c = cfg(s, k, o, opt);
          ++runs;
          auto r = run(l.code, c);
          if (!r.bugs.empty())
            fail(v, label(l, c) + " reported " + std::to_string(r.bugs.size()) + " bugs");
        }
  int control = 0;
  for (int k = 2; k <= l.longest; ++k)
    for (Order o : {Order::FalseFirst, Order::TrueFirst})
      for (bool opt : {false, true}) {
        SearchConfig c = cfg(Strategy::Speculative, k, o, opt, false);
        auto r = run(l.code, c);
        ++control;
        if (r.bugs.size() != 1 || r.bugs[0].message != "divide-by-zero" || r.bugs[0].verified)
          fail(v, label(l, c) + " reported " + std::to_string(r.bugs.size()) +
                      " bugs, expected one unverified divide-by-zero");
      }
  if (v.pass)
    v.detail = std::to_string(runs) + " runs clean; " + std::to_string(control) +
               " no-recheck runs each report the spurious division";
  return v;
}

Verdict backtracking_budget() {
  Verdict v;
  BuiltinSolver solver;
  std::size_t segments = 0;
  for (const Loaded &l : corpus())
    for (int k = 1; k <= l.longest; ++k)
      for (Order o : {Order::FalseFirst, Order::TrueFirst})
        for (bool opt : {false, true}) {
          SearchConfig c = cfg(Strategy::Speculative, k, o, opt);
          auto r = run(l.code, c);
          for (const SegmentFailure &f : r.failures) {
            ++segments;
            if (f.invocations > 1 + ceil_log2(f.length))
              fail(v, label(l, c) + ": segment of " + std::to_string(f.length) + " took " +
                          std::to_string(f.invocations) + " calls");
          }
        }

  // Random failed segments: grow a conjunction until it dies, pad it, and
  // compare bisection against a front-to-back scan.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> var(0, 2), coeff(-3, 3), rhs(-6, 6), rel(0, 5),
      pad(0, 8);
  int random = 0;
  while (random < 1000) {
    std::vector<Constraint> pc;
    bool dead = false;
    for (int i = 0; i < 12 && !dead; ++i) {
      pc.push_back(normalize({{"V" + std::to_string(var(rng)), coeff(rng)},
                              {"V" + std::to_string(var(rng)), coeff(rng)}},
                             static_cast<Rel>(rel(rng)), rhs(rng)));
      dead = !solver.solve(pc).sat();
    }
    if (!dead)
      continue;
    for (int i = pad(rng); i > 0; --i)
      pc.push_back(normalize({{"V1", 1}}, Rel::Le, rhs(rng)));
    int m = static_cast<int>(pc.size());
    auto feasible = [&](int i) { return solver.solve({pc.begin(), pc.begin() + i}).sat(); };
    int linear = 0;
    for (int i = 1; i <= m && !linear; ++i)
      if (!feasible(i))
        linear = i;
    BisectResult b = backtrack_binary_search(m, feasible);
    if (b.first_bad != linear)
      fail(v, "bisection found " + std::to_string(b.first_bad) + ", scan found " +
                  std::to_string(linear) + " in " + to_string(pc));
    if (b.probes > ceil_log2(m))
      fail(v, "bisection used " + std::to_string(b.probes) + " probes for " +
                  std::to_string(m));
    ++random;
  }
  if (v.pass)
    v.detail = std::to_string(segments) + " corpus segments within budget; " +
               std::to_string(random) + " random segments agree with a linear scan";
  return v;
}

Verdict solver_differential() {
  Verdict v;
  SolverOptions opts;
  opts.domain_lo = -8;
  opts.domain_hi = 8;
  ConjunctionSpec spec;
  spec.max_vars = 3;
  std::vector<std::vector<Constraint>> qs;
  for (std::uint64_t i = 0; i < 10000; ++i)
    qs.push_back(random_conjunction(700000 + i, spec));
  auto verdicts = solve_batch_parallel(qs, opts);

  std::unique_ptr<Solver> external;
  if (const char *cmd = std::getenv("SSE_EXTERNAL_SOLVER"); cmd && *cmd)
    external = std::make_unique<ExternalSolver>(cmd, opts);

  int sat = 0, ext = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    bool want = oracle::brute_force(qs[i], opts.domain_lo, opts.domain_hi).has_value();
    if (verdicts[i].sat() != want) {
      fail(v, "verdict differs from brute force on " + to_string(qs[i]));
      continue;
    }
    if (verdicts[i].sat()) {
      ++sat;
      if (!oracle::holds_all(qs[i], verdicts[i].model))
        fail(v, "model does not satisfy " + to_string(qs[i]));
    }
    if (external) {
      ++ext;
      if (external->solve(qs[i]).sat() != want)
        fail(v, "external verdict differs on " + to_string(qs[i]));
    }
  }
  if (v.pass) {
    v.detail = "10000 conjunctions agree with brute force (" + std::to_string(sat) +
               " sat, models verified)";
    v.detail += ext ? "; external solver agrees" : "; no external solver configured";
  }
  return v;
}

Verdict savings_substitute() {
  Verdict v;
  std::ostringstream os;
  Loaded wbs = load("wbs");
  auto pure = run(wbs.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
  double last = 0;
  double best = 0;
  for (int k = 1; k <= wbs.longest; ++k) {
    auto r = run(wbs.code, cfg(Strategy::Speculative, k, Order::FalseFirst, false));
    double factor = double(pure.stats.total) / double(r.stats.total);
    if (factor + 1e-12 < last)
      fail(v, "wbs reduction factor drops at k=" + std::to_string(k));
    last = factor;
    best = std::max(best, factor);
  }
  double limit = 2.0 - std::pow(2.0, 1 - wbs.longest);
  if (best + 1e-9 < limit)
    fail(v, "wbs best factor " + std::to_string(best) + " below " + std::to_string(limit));
  os << "wbs pure/sse factor reaches " << best << " at k=" << wbs.longest;

  for (const Loaded &l : corpus())
    for (Order o : {Order::FalseFirst, Order::TrueFirst}) {
      auto p = run(l.code, cfg(Strategy::Pure, 1, o, false));
      std::uint64_t best_total = p.stats.total + 1;
      for (int k = 1; k <= l.longest; ++k)
        best_total = std::min(best_total,
                              run(l.code, cfg(Strategy::Speculative, k, o, true)).stats.total);
      if (best_total > p.stats.total)
        fail(v, l.name + " " + std::string(to_string(o)) + ": best optimized " +
                    std::to_string(best_total) + " > pure " + std::to_string(p.stats.total));
    }
  if (v.pass) {
    os << "; optimized sse at its best k never exceeds pure on any corpus program";
    v.detail = os.str();
  }
  return v;
}

struct Criterion {
  const char *title;
  std::function<Verdict()> check;
  double limit_seconds;
};

} // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria = {
      {"worked example totals", worked_example, 1},
      {"modified example totals", modified_example, 1},
      {"closed-form grid on full trees", closed_form_grid, 30},
      {"random trees: speculative > pure / 2", random_trees, 300},
      {"leaf equivalence with pure DFS", leaf_equivalence, 120},
      {"k=1 degenerates to pure DFS", degeneration, 0},
      {"false alarms eliminated", false_alarms, 0},
      {"backtracking budget", backtracking_budget, 0},
      {"solver differential", solver_differential, 0},
      {"call savings substitute", savings_substitute, 0},
  };
  std::vector<int> which;
  if (argc > 1) {
    int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: sse-acceptance [1-" << criteria.size() << "]\n";
      return 64;
    }
    which.push_back(n);
  } else {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i)
      which.push_back(i);
  }
  int failed = 0;
  for (int n : which) {
    const Criterion &c = criteria[n - 1];
    auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception &e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      v.pass = false;
      v.detail += " (took " + std::to_string(secs) + " s, limit " +
                  std::to_string(c.limit_seconds) + " s)";
    }
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << c.title
              << ": " << v.detail << " [" << std::fixed;
    std::cout.precision(2);
    std::cout << secs << " s]" << std::defaultfloat << std::endl;
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
