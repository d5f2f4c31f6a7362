#include "oracles.hpp"
#include "sse/lang.hpp"
#include "sse/search.hpp"
#include "sse/solver.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace sse;

namespace {

struct Loaded {
  std::string name;
  Program program;
  Code code;
};

Loaded load(const std::string &name) {
  Loaded l;
  l.name = name;
  l.program = load_program(std::string(SSE_CORPUS_DIR) + "/" + name + ".sx");
  l.code = lower(l.program);
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

int longest(const Loaded &l) { return std::max(1, longest_path_branch_count(l.program, 8)); }

int ceil_log2(int m) {
  int r = 0;
  while ((1 << r) < m)
    ++r;
  return r;
}

// Every speculative configuration swept by the correctness properties.
template <class F> void for_each_config(const Loaded &l, F f) {
  for (int k = 1; k <= longest(l); ++k)
    for (Order o : {Order::FalseFirst, Order::TrueFirst})
      for (bool opt : {false, true})
        f(cfg(Strategy::Speculative, k, o, opt));
}

std::string describe(const Loaded &l, const SearchConfig &c) {
  return l.name + " k=" + std::to_string(c.depth) + " " + std::string(to_string(c.order)) +
         (c.optimize ? " opt" : "");
}

/// Solver that throws for chosen conjunctions and logs every query.
class ThrowingSolver : public Solver {
public:
  explicit ThrowingSolver(std::function<bool(const std::vector<Constraint> &)> bad)
      : bad_(std::move(bad)) {}
  SolverVerdict solve(const std::vector<Constraint> &cs) override {
    log.push_back(cs);
    if (bad_(cs))
      throw SolverException("refused");
    return inner_.solve(cs);
  }
  std::string name() const override { return "throwing"; }
  std::vector<std::vector<Constraint>> log;

private:
  std::function<bool(const std::vector<Constraint> &)> bad_;
  BuiltinSolver inner_;
};

} // namespace

//===----------------------------------------------------------------------===//
// Worked examples
//===----------------------------------------------------------------------===//

TEST(Search, AbsSumPureIs14) {
  Loaded l = load("fig1");
  for (Order o : {Order::FalseFirst, Order::TrueFirst})
    for (bool opt : {false, true}) {
      auto r = run(l.code, cfg(Strategy::Pure, 1, o, opt));
      EXPECT_EQ(r.stats.total, 14u);
      EXPECT_EQ(r.stats.sat, 14u);
      EXPECT_EQ(leaf_multiset(r).size(), 8u);
    }
}

TEST(Search, AbsSumSpeculativeDepth3Is8) {
  Loaded l = load("fig1");
  auto r = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, false));
  EXPECT_EQ(r.stats.total, 8u);
  EXPECT_EQ(r.stats.unsat, 0u);
}

TEST(Search, ModifiedPureIs14) {
  Loaded l = load("fig1_modified");
  auto r = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
  EXPECT_EQ(r.stats.total, 14u);
  EXPECT_EQ(r.stats.unsat, 2u);
}

TEST(Search, ModifiedFalseFirstIs11) {
  Loaded l = load("fig1_modified");
  auto r = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, false));
  EXPECT_EQ(r.stats.total, 11u);
  EXPECT_EQ(r.stats.sat, 9u);
  EXPECT_EQ(r.stats.unsat, 2u);
  ASSERT_EQ(r.failures.size(), 2u);
  // The first failed segment is the whole third-level path; bisection takes
  // two extra calls and lands on the last branch.
  EXPECT_EQ(r.failures[0].length, 3);
  EXPECT_EQ(r.failures[0].first_bad, 3);
  EXPECT_EQ(r.failures[0].invocations, 3);
}

TEST(Search, ModifiedTrueFirstIs8) {
  Loaded l = load("fig1_modified");
  auto r = run(l.code, cfg(Strategy::Speculative, 3, Order::TrueFirst, false));
  EXPECT_EQ(r.stats.total, 8u);
}

TEST(Search, ModifiedOptimizedIs9With2Avoided) {
  Loaded l = load("fig1_modified");
  auto r = run(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, true));
  EXPECT_EQ(r.stats.total, 9u);
  EXPECT_EQ(r.stats.avoided, 2u);
  EXPECT_EQ(r.stats.unsat, 2u);
}

TEST(Search, StraightLineNeedsNoSolver) {
  Code code = lower(parse_program("sym int a;\nb = a * 3;\nprint(b);\n"));
  for (Strategy s : {Strategy::Pure, Strategy::Speculative}) {
    auto r = run(code, cfg(s, 3, Order::TrueFirst, true));
    EXPECT_EQ(r.stats.total, 0u);
    EXPECT_EQ(r.leaves.size(), 1u);
  }
}

TEST(Search, StatsCoherence) {
  for (const Loaded &l : corpus())
    for_each_config(l, [&](const SearchConfig &c) {
      auto r = run(l.code, c);
      EXPECT_EQ(r.stats.total, r.stats.sat + r.stats.unsat) << describe(l, c);
      std::uint64_t sides = 0;
      for (int f = 0; f < 2; ++f)
        for (int t = 0; t < 2; ++t)
          for (int e = 0; e < 2; ++e)
            sides += r.stats.sides[f][t][e];
      EXPECT_EQ(sides, r.stats.total) << describe(l, c);
      EXPECT_EQ(r.queries.size(), r.stats.total) << describe(l, c);
    });
}

TEST(Search, AvoidedEqualsSavedSideChecksInPure) {
  for (const Loaded &l : corpus())
    for (Order o : {Order::FalseFirst, Order::TrueFirst}) {
      auto plain = run(l.code, cfg(Strategy::Pure, 1, o, false));
      auto opt = run(l.code, cfg(Strategy::Pure, 1, o, true));
      EXPECT_EQ(plain.stats.total - opt.stats.total, opt.stats.avoided) << l.name;
      EXPECT_EQ(compare_leaves(plain, opt), std::nullopt) << l.name;
    }
}

//===----------------------------------------------------------------------===//
// Correctness properties
//===----------------------------------------------------------------------===//

TEST(Search, PureEqualsSpeculativeDepthOneQueryForQuery) {
  for (const Loaded &l : corpus())
    for (Order o : {Order::FalseFirst, Order::TrueFirst}) {
      auto pure = run(l.code, cfg(Strategy::Pure, 1, o, false));
      auto spec = run(l.code, cfg(Strategy::Speculative, 1, o, false));
      EXPECT_EQ(pure.stats, spec.stats) << l.name;
      ASSERT_EQ(pure.queries.size(), spec.queries.size()) << l.name;
      for (std::size_t i = 0; i < pure.queries.size(); ++i) {
        EXPECT_EQ(pure.queries[i].constraints, spec.queries[i].constraints) << l.name << " #" << i;
        EXPECT_EQ(pure.queries[i].status, spec.queries[i].status) << l.name << " #" << i;
      }
      EXPECT_EQ(compare_leaves(pure, spec), std::nullopt);
    }
}

TEST(Search, SameLeavesAsPureEverywhere) {
  for (const Loaded &l : corpus()) {
    auto pure = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
    for_each_config(l, [&](const SearchConfig &c) {
      auto r = run(l.code, c);
      auto diff = compare_leaves(pure, r);
      EXPECT_EQ(diff, std::nullopt) << describe(l, c) << ": " << diff.value_or("");
      EXPECT_EQ(r.bugs.size(), pure.bugs.size()) << describe(l, c);
    });
  }
}

TEST(Search, LeavesPartitionTheInputBox) {
  for (const Loaded &l : corpus()) {
    std::int64_t lo = -3, hi = 3;
    if (l.name == "loop") {
      lo = -2;
      hi = 12; // reaches the loop bound
    }
    for (Strategy s : {Strategy::Pure, Strategy::Speculative}) {
      auto r = run(l.code, cfg(s, 3, Order::TrueFirst, true));
      auto problem = oracle::check_partition(l.program, r, 8, lo, hi);
      EXPECT_EQ(problem, std::nullopt) << l.name << ": " << problem.value_or("");
    }
  }
}

TEST(Search, SolverModelsReplayConcretely) {
  BuiltinSolver solver;
  for (const Loaded &l : corpus()) {
    auto r = run(l.code, cfg(Strategy::Speculative, 2, Order::FalseFirst, true));
    oracle::Interpreter interp(l.program, 8);
    for (const Leaf &leaf : r.leaves) {
      if (leaf.kind == LeafKind::Pruned)
        continue;
      SolverVerdict v = solver.solve(leaf.pc);
      ASSERT_TRUE(v.sat()) << l.name << " " << to_string(leaf.pc);
      Model in = v.model;
      for (const auto &x : l.program.inputs)
        in.emplace(x, 0);
      oracle::ConcreteRun cr = interp.run(in);
      EXPECT_EQ(cr.outcome == oracle::Outcome::Error, leaf.kind == LeafKind::Error)
          << l.name << " " << to_string(leaf.pc);
      if (leaf.kind == LeafKind::Error) {
        EXPECT_EQ(cr.message, leaf.message);
      }
      // The model selects this leaf and no other.
      int hits = 0;
      for (const Leaf &other : r.leaves)
        if (other.kind != LeafKind::Pruned && oracle::holds_all(other.pc, in))
          ++hits;
      EXPECT_EQ(hits, 1) << l.name << " " << to_string(leaf.pc);
    }
  }
}

TEST(Search, NoLeafIsUnsatAndPrunedLeavesAre) {
  BuiltinSolver solver;
  for (const Loaded &l : corpus())
    for_each_config(l, [&](const SearchConfig &c) {
      auto r = run(l.code, c);
      for (const Leaf &leaf : r.leaves)
        EXPECT_EQ(solver.solve(leaf.pc).sat(), leaf.kind != LeafKind::Pruned)
            << describe(l, c) << " " << to_string(leaf.kind) << " " << to_string(leaf.pc);
    });
}

TEST(Search, LedgerConfirmedStatesAreFeasible) {
  BuiltinSolver solver;
  std::size_t audited = 0;
  for (const Loaded &l : corpus())
    for_each_config(l, [&](const SearchConfig &c) {
      auto r = run(l.code, c);
      if (!c.optimize) {
        EXPECT_TRUE(r.ledger_confirmed.empty());
      }
      for (const auto &pc : r.ledger_confirmed) {
        ++audited;
        EXPECT_TRUE(solver.solve(pc).sat()) << describe(l, c) << " " << to_string(pc);
      }
    });
  EXPECT_GT(audited, 0u);
}

TEST(Search, DeterministicRuns) {
  for (const Loaded &l : corpus()) {
    auto c = cfg(Strategy::Speculative, 3, Order::TrueFirst, true);
    auto a = run(l.code, c), b = run(l.code, c);
    EXPECT_EQ(a.stats, b.stats);
    EXPECT_EQ(leaf_multiset(a), leaf_multiset(b));
    EXPECT_EQ(a.executed, b.executed);
  }
}

//===----------------------------------------------------------------------===//
// Backtracking
//===----------------------------------------------------------------------===//

TEST(Bisect, ThreeWithLastInfeasible) {
  std::vector<int> probed;
  BisectResult r = backtrack_binary_search(3, [&](int i) {
    probed.push_back(i);
    return i < 3;
  });
  EXPECT_EQ(r.first_bad, 3);
  EXPECT_EQ(r.probes, 2);
  EXPECT_EQ(probed, (std::vector<int>{1, 2}));
}

TEST(Bisect, LengthOneNeedsNothing) {
  BisectResult r = backtrack_binary_search(1, [](int) -> bool {
    ADD_FAILURE() << "no probe expected";
    return false;
  });
  EXPECT_EQ(r.first_bad, 1);
  EXPECT_EQ(r.probes, 0);
}

TEST(Bisect, EightWithFirstBadFive) {
  BisectResult r = backtrack_binary_search(8, [](int i) { return i < 5; });
  EXPECT_EQ(r.first_bad, 5);
  EXPECT_LE(r.probes, 3);
}

TEST(Bisect, ExhaustiveSmallSegments) {
  for (int m = 1; m <= 40; ++m)
    for (int bad = 1; bad <= m; ++bad) {
      int calls = 0;
      BisectResult r = backtrack_binary_search(m, [&](int i) {
        ++calls;
        EXPECT_GE(i, 1);
        EXPECT_LT(i, m);
        return i < bad;
      });
      EXPECT_EQ(r.first_bad, bad);
      EXPECT_EQ(r.probes, calls);
      EXPECT_LE(calls, ceil_log2(m));
    }
}

TEST(Bisect, MatchesLinearScanOnRandomConstraintSegments) {
  BuiltinSolver solver;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> var(0, 2), coeff(-3, 3), rhs(-6, 6), rel(0, 5);
  int done = 0;
  while (done < 1000) {
    // Grow a path condition one random constraint at a time until it dies,
    // then pad the dead tail.
    std::vector<Constraint> pc;
    int first_bad = 0;
    for (int i = 1; i <= 12 && !first_bad; ++i) {
      pc.push_back(normalize({{"V" + std::to_string(var(rng)), coeff(rng)},
                              {"V" + std::to_string(var(rng)), coeff(rng)}},
                             static_cast<Rel>(rel(rng)), rhs(rng)));
      if (!solver.solve(pc).sat())
        first_bad = i;
    }
    if (!first_bad)
      continue;
    int pad = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int i = 0; i < pad; ++i)
      pc.push_back(normalize({{"V0", 1}}, Rel::Ge, rhs(rng)));
    int m = static_cast<int>(pc.size());
    // Anchor: nothing before position 1; the segment is the whole list.
    int linear = 0;
    for (int i = 1; i <= m && !linear; ++i)
      if (!solver.solve({pc.begin(), pc.begin() + i}).sat())
        linear = i;
    BisectResult r = backtrack_binary_search(m, [&](int i) {
      return solver.solve({pc.begin(), pc.begin() + i}).sat();
    });
    ASSERT_EQ(r.first_bad, linear) << to_string(pc);
    ASSERT_EQ(linear, first_bad);
    ASSERT_LE(r.probes, ceil_log2(m));
    ++done;
  }
}

TEST(Search, EveryFailedSegmentStaysWithinBudgetAndMatchesLinearScan) {
  BuiltinSolver solver;
  std::size_t segments = 0;
  for (const Loaded &l : corpus())
    for_each_config(l, [&](const SearchConfig &c) {
      auto r = run(l.code, c);
      for (const SegmentFailure &f : r.failures) {
        ++segments;
        EXPECT_LE(f.invocations, 1 + ceil_log2(f.length)) << describe(l, c);
        ASSERT_EQ(static_cast<int>(f.prefixes.size()), f.length);
        int linear = 0;
        for (int i = 1; i <= f.length && !linear; ++i)
          if (!solver.solve(f.prefixes[i - 1]).sat())
            linear = i;
        EXPECT_EQ(f.first_bad, linear) << describe(l, c);
      }
    });
  EXPECT_GT(segments, 10u);
}

//===----------------------------------------------------------------------===//
// Absurdity
//===----------------------------------------------------------------------===//

TEST(Absurdity, LedgerAnswers) {
  AbsurdityLedger ledger;
  EXPECT_EQ(apply_absurdity(ledger, 4, true), Absurdity::Unknown);
  ledger.record(4, false);
  EXPECT_EQ(apply_absurdity(ledger, 4, true), Absurdity::KnownFeasible);
  EXPECT_EQ(apply_absurdity(ledger, 4, false), Absurdity::Unknown);
  EXPECT_EQ(apply_absurdity(ledger, 5, true), Absurdity::Unknown);
  EXPECT_THROW(ledger.record(4, true), std::logic_error);
  ledger.record(4, false);
  EXPECT_EQ(ledger.size(), 1u);
}

TEST(Absurdity, DepthResetFlagKeepsLeaves) {
  for (const Loaded &l : corpus()) {
    auto pure = run(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false));
    for (int k = 1; k <= longest(l); ++k) {
      SearchConfig c = cfg(Strategy::Speculative, k, Order::FalseFirst, true);
      c.absurdity_resets_depth = false;
      auto r = run(l.code, c);
      EXPECT_EQ(compare_leaves(pure, r), std::nullopt) << l.name << " k=" << k;
    }
  }
}

//===----------------------------------------------------------------------===//
// Bug reports
//===----------------------------------------------------------------------===//

TEST(Bugs, DeadDivisionIsNeverReported) {
  Loaded l = load("fig6");
  for (Strategy s : {Strategy::Pure, Strategy::Speculative})
    for (int k = 1; k <= longest(l) + 1; ++k)
      for (Order o : {Order::FalseFirst, Order::TrueFirst})
        for (bool opt : {false, true}) {
          auto r = run(l.code, cfg(s, k, o, opt));
          EXPECT_TRUE(r.bugs.empty()) << k;
        }
}

TEST(Bugs, WithoutRecheckTheDeadDivisionIsReportedOnce) {
  Loaded l = load("fig6");
  for (int k = 2; k <= longest(l) + 1; ++k)
    for (Order o : {Order::FalseFirst, Order::TrueFirst})
      for (bool opt : {false, true}) {
        auto r = run(l.code, cfg(Strategy::Speculative, k, o, opt, false));
        ASSERT_EQ(r.bugs.size(), 1u) << k << " " << to_string(o);
        EXPECT_EQ(r.bugs[0].message, "divide-by-zero");
        EXPECT_FALSE(r.bugs[0].verified);
        BuiltinSolver s;
        EXPECT_FALSE(s.solve(r.bugs[0].pc).sat());
      }
  // Depth 1 never speculates, so the flag changes nothing.
  auto r = run(l.code, cfg(Strategy::Speculative, 1, Order::TrueFirst, false, false));
  EXPECT_TRUE(r.bugs.empty());
  auto p = run(l.code, cfg(Strategy::Pure, 1, Order::TrueFirst, false, false));
  EXPECT_TRUE(p.bugs.empty());
}

TEST(Bugs, ReachableErrorHasAReplayableWitness) {
  Program prog = parse_program(
      "sym int x;\nsym int y;\nif (x > 3) {\n  if (y < x - 5) {\n    error(\"x\");\n  }\n}\n");
  Code code = lower(prog);
  oracle::Interpreter interp(prog, 8);
  for (Strategy s : {Strategy::Pure, Strategy::Speculative})
    for (int k = 1; k <= 3; ++k) {
      auto r = run(code, cfg(s, k, Order::TrueFirst, true));
      ASSERT_EQ(r.bugs.size(), 1u);
      const BugReport &b = r.bugs[0];
      EXPECT_EQ(b.message, "x");
      EXPECT_EQ(b.line, 5);
      EXPECT_TRUE(b.verified);
      EXPECT_TRUE(oracle::holds_all(b.pc, b.witness));
      auto cr = interp.run(b.witness);
      EXPECT_EQ(cr.outcome, oracle::Outcome::Error);
      EXPECT_EQ(cr.message, "x");
    }
}

TEST(Bugs, FailedAssertionsAndDivisionsInCorpus) {
  Loaded ratio = load("ratio");
  auto r = run(ratio.code, cfg(Strategy::Speculative, 3, Order::TrueFirst, true));
  ASSERT_EQ(r.bugs.size(), 1u);
  EXPECT_EQ(r.bugs[0].message, "divide-by-zero");
  EXPECT_EQ(r.bugs[0].witness.at("x"), r.bugs[0].witness.at("y"));
  EXPECT_GT(r.bugs[0].witness.at("x"), 0);

  Loaded list = load("sorted_list");
  auto s = run(list.code, cfg(Strategy::Speculative, 3, Order::TrueFirst, true));
  ASSERT_EQ(s.bugs.size(), 1u);
  EXPECT_EQ(s.bugs[0].message, "list out of order");
}

//===----------------------------------------------------------------------===//
// Solver exceptions
//===----------------------------------------------------------------------===//

TEST(Exceptions, PureRunCarriesTheOffendingPathCondition) {
  Loaded l = load("fig1");
  ThrowingSolver s([](const auto &cs) { return cs.size() >= 2; });
  try {
    run_pure_dfs(l.code, cfg(Strategy::Pure, 1, Order::FalseFirst, false), s);
    FAIL() << "expected SearchAborted";
  } catch (const SearchAborted &a) {
    EXPECT_EQ(a.pc.size(), 2u);
    EXPECT_EQ(a.partial.stats.exceptions, 1u);
    EXPECT_EQ(a.partial.stats.total, 1u);
  }
}

TEST(Exceptions, ScanRecoversFromAnEarlierInfeasiblePrefix) {
  Program prog = parse_program("sym int x;\nsym int y;\n"
                               "if (x > 0) {\n  if (x < 0) {\n    if (y > 0) {\n"
                               "      print(y);\n    }\n  }\n}\n");
  Code code = lower(prog);
  std::vector<Constraint> poisoned;
  {
    auto X = LinearForm::of_var("x"), Y = LinearForm::of_var("y"),
         zero = LinearForm::of_constant(0);
    poisoned = {make_constraint(X, Rel::Gt, zero), make_constraint(X, Rel::Lt, zero),
                make_constraint(Y, Rel::Gt, zero)};
  }
  ThrowingSolver s([&](const auto &cs) { return cs == poisoned; });
  auto c = cfg(Strategy::Speculative, 3, Order::TrueFirst, false);
  ExplorationRecord r = run_speculative_dfs(code, c, s);
  EXPECT_EQ(r.stats.exceptions, 1u);
  EXPECT_EQ(std::count(s.log.begin(), s.log.end(), poisoned), 1);
  BuiltinSolver b;
  auto pure = run_pure_dfs(code, cfg(Strategy::Pure, 1, Order::TrueFirst, false), b);
  EXPECT_EQ(compare_leaves(pure, r), std::nullopt);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_EQ(r.failures[0].first_bad, 2);
}

TEST(Exceptions, UndecidableSegmentAborts) {
  Loaded l = load("fig1");
  ThrowingSolver s([](const auto &cs) { return cs.size() >= 3; });
  try {
    run_speculative_dfs(l.code, cfg(Strategy::Speculative, 3, Order::FalseFirst, false), s);
    FAIL() << "expected SearchAborted";
  } catch (const SearchAborted &a) {
    EXPECT_EQ(a.pc.size(), 3u);
    EXPECT_GE(a.partial.stats.exceptions, 1u);
    // The conjunction that raised was submitted exactly once.
    EXPECT_EQ(std::count(s.log.begin(), s.log.end(), a.pc), 1);
  }
}

TEST(Exceptions, BisectionExceptionFallsBackToScan) {
  Program prog = parse_program("sym int x;\nsym int y;\nsym int z;\nsym int w;\nsym int v;\n"
                               "if (x > 0) {\n if (x < 0) {\n  if (y > 0) {\n   if (z > 0) {\n"
                               "    if (w > 0) {\n     if (v > 0) {\n      print(v);\n"
                               "     }\n    }\n   }\n  }\n }\n}\n");
  Code code = lower(prog);
  // The six-branch segment fails; the first probe (position 3) is refused,
  // and the scan still finds position 2 without reaching it.
  auto X = LinearForm::of_var("x"), Y = LinearForm::of_var("y"),
       zero = LinearForm::of_constant(0);
  std::vector<Constraint> probe = {make_constraint(X, Rel::Gt, zero),
                                   make_constraint(X, Rel::Lt, zero),
                                   make_constraint(Y, Rel::Gt, zero)};
  ThrowingSolver s([&](const auto &cs) { return cs == probe; });
  auto r = run_speculative_dfs(code, cfg(Strategy::Speculative, 6, Order::TrueFirst, false), s);
  EXPECT_EQ(r.stats.exceptions, 1u);
  EXPECT_EQ(std::count(s.log.begin(), s.log.end(), probe), 1);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_EQ(r.failures[0].length, 6);
  EXPECT_EQ(r.failures[0].first_bad, 2);
  BuiltinSolver b;
  auto pure = run_pure_dfs(code, cfg(Strategy::Pure, 1, Order::TrueFirst, false), b);
  EXPECT_EQ(compare_leaves(pure, r), std::nullopt);
}

//===----------------------------------------------------------------------===//
// Corpus sidecars
//===----------------------------------------------------------------------===//

TEST(Corpus, ExpectedValuesSidecars) {
  for (const Loaded &l : corpus()) {
    std::ifstream in(std::string(SSE_CORPUS_DIR) + "/" + l.name + ".expected.json");
    ASSERT_TRUE(in) << l.name << " has no sidecar";
    auto want = nlohmann::json::parse(in);
    EXPECT_EQ(want["program"], l.name);
    EXPECT_EQ(want["longest_path"], longest_path_branch_count(l.program, 8)) << l.name;
    for (Order o : {Order::FalseFirst, Order::TrueFirst}) {
      std::string key(to_string(o));
      auto pure = run(l.code, cfg(Strategy::Pure, 1, o, false));
      EXPECT_EQ(want["pure"][key], pure.stats.total) << l.name << " " << key;
      auto sse = run(l.code, cfg(Strategy::Speculative, 3, o, false));
      EXPECT_EQ(want["sse_k3"][key]["total"], sse.stats.total) << l.name << " " << key;
      EXPECT_EQ(want["sse_k3"][key]["sat"], sse.stats.sat) << l.name << " " << key;
      EXPECT_EQ(want["sse_k3"][key]["unsat"], sse.stats.unsat) << l.name << " " << key;
      auto opt = run(l.code, cfg(Strategy::Speculative, 3, o, true));
      EXPECT_EQ(want["sse_k3_optimized"][key]["total"], opt.stats.total) << l.name << " " << key;
      EXPECT_EQ(want["sse_k3_optimized"][key]["avoided"], opt.stats.avoided) << l.name;
      std::vector<std::string> bugs;
      for (const auto &b : pure.bugs)
        bugs.push_back(b.message);
      EXPECT_EQ(want["bugs"].get<std::vector<std::string>>(), bugs) << l.name;
    }
  }
}
