//===-- search.hpp - Pure and speculative depth-first search ----*- C++ -*-===//
//
// Speculative DFS takes up to k branches without asking the solver. The
// accumulated path condition is checked when the k-th unchecked branch is
// taken, at a path end, and before reporting a bug. A failed check is
// localized by bisection over the unchecked prefixes, and the first
// infeasible branch is recorded so its sibling can be entered without a
// query when the absurdity optimization is on.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/lang.hpp"
#include "sse/solver.hpp"
#include "sse/symcore.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sse {

enum class Strategy { Pure, Speculative };
enum class Order { FalseFirst, TrueFirst };

std::string_view to_string(Strategy s);
std::string_view to_string(Order o);
Strategy parse_strategy(std::string_view s);
Order parse_order(std::string_view s);

struct SearchConfig {
  Strategy strategy = Strategy::Speculative;
  int depth = 3;
  Order order = Order::TrueFirst;
  bool optimize = true;
  bool recheck = true;
  int loop_bound = 8;
  // Whether a branch entered through the ledger starts a new segment.
  bool absurdity_resets_depth = true;
};

enum class LeafKind { Normal, Error, Pruned };
std::string_view to_string(LeafKind k);

struct Leaf {
  LeafKind kind = LeafKind::Normal;
  std::vector<Constraint> pc;
  int instr = -1;
  std::string message;
};

struct BugReport {
  std::string message;
  int instr = -1;
  int line = 0;
  std::vector<Constraint> pc;
  Model witness;
  // False when the report was emitted without a reachability check.
  bool verified = true;
};

enum class QueryPurpose { Side, PathEnd, ErrorSite, Probe, Scan };
std::string_view to_string(QueryPurpose p);

struct QueryRecord {
  std::vector<Constraint> constraints;
  SolverStatus status = SolverStatus::Unsat;
  QueryPurpose purpose = QueryPurpose::Side;
  SideInfo side;
};

/// One failed speculation segment. `prefixes[i]` is the path condition of
/// segment position i+1; the last one was known infeasible on entry.
struct SegmentFailure {
  int length = 0;
  int invocations = 0;
  int first_bad = 0;
  std::vector<std::vector<Constraint>> prefixes;
};

struct ExplorationRecord {
  std::vector<Leaf> leaves;
  SolverStats stats;
  std::uint64_t executed = 0;
  std::vector<BugReport> bugs;
  std::vector<QueryRecord> queries;
  std::vector<SegmentFailure> failures;
  // Path conditions of states entered as feasible through the ledger.
  std::vector<std::vector<Constraint>> ledger_confirmed;
};

class SearchAborted : public std::runtime_error {
public:
  SearchAborted(const std::string &what, std::vector<Constraint> pc,
                ExplorationRecord partial)
      : std::runtime_error(what), pc(std::move(pc)), partial(std::move(partial)) {}
  std::vector<Constraint> pc;
  ExplorationRecord partial;
};

/// Branch id -> side proven infeasible (true = the true side).
class AbsurdityLedger {
public:
  /// Throws std::logic_error if the other side is already recorded.
  void record(std::uint64_t branch_id, bool infeasible_side);
  std::optional<bool> infeasible_side(std::uint64_t branch_id) const;
  std::size_t size() const { return entries_.size(); }

private:
  std::map<std::uint64_t, bool> entries_;
};

enum class Absurdity { KnownFeasible, Unknown };

Absurdity apply_absurdity(const AbsurdityLedger &ledger, std::uint64_t branch_id,
                          bool side);

struct BisectResult {
  int first_bad = 0;
  int probes = 0;
};

/// Positions 1..m of a segment, where position m is known infeasible and the
/// position before 1 is known feasible. Returns the smallest infeasible
/// position using at most ceil(log2 m) calls of `prefix_feasible`.
BisectResult backtrack_binary_search(int m,
                                     const std::function<bool(int)> &prefix_feasible);

ExplorationRecord run_pure_dfs(const Code &code, const SearchConfig &cfg,
                               Solver &solver);
ExplorationRecord run_speculative_dfs(const Code &code, const SearchConfig &cfg,
                                      Solver &solver);
/// Dispatches on cfg.strategy.
ExplorationRecord run_search(const Code &code, const SearchConfig &cfg,
                             Solver &solver);

using LeafKey = std::pair<LeafKind, std::vector<Constraint>>;

/// Sorted normal-end and error leaves.
std::vector<LeafKey> leaf_multiset(const ExplorationRecord &r);

/// Empty when equal, otherwise a description of the first difference.
std::optional<std::string> compare_leaves(const ExplorationRecord &expected,
                                          const ExplorationRecord &actual);

} // namespace sse
