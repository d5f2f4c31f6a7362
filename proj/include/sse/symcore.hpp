//===-- symcore.hpp - Symbolic interpreter ----------------------*- C++ -*-===//
//
// Symbolic states over the lowered instruction list. `step` executes one
// instruction and reports what happened; it never decides feasibility.
//
// Integer division by a non-constant divisor forks: the divide-by-zero side
// is an error site carrying `d == 0`, the other side continues with `d != 0`
// and an opaque quotient symbol named `$q<n>`.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/constraint.hpp"
#include "sse/lang.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sse {

struct SymExpr;

/// coeff * (num / den), kept explicit because it is not linear.
struct DivTerm {
  std::int64_t coeff = 1;
  std::shared_ptr<const SymExpr> num;
  std::shared_ptr<const SymExpr> den;
};

struct SymExpr {
  LinearForm lin;
  std::vector<DivTerm> divs;

  bool is_linear() const { return divs.empty(); }
};

bool operator==(const SymExpr &a, const SymExpr &b);
std::string to_string(const SymExpr &e);

using Env = std::map<std::string, LinearForm>;

/// Evaluates `e` under `env`. Divisions with both operands constant are
/// folded (truncating), other divisions stay as DivTerms. Throws
/// std::out_of_range for an unbound variable and std::domain_error for a
/// constant zero divisor.
SymExpr eval(const Env &env, const IntExpr &e);

/// Truncating integer division as performed by the language.
std::int64_t div_trunc(std::int64_t n, std::int64_t d);

enum class Feasibility { Unknown, Sat, Unsat };

struct PCEntry {
  Constraint constraint;
  std::uint64_t branch_id = 0;
};

struct PathCondition {
  std::vector<PCEntry> entries;
  Feasibility status = Feasibility::Unknown;

  std::vector<Constraint> constraints() const;
  std::size_t size() const { return entries.size(); }
};

/// Throws std::invalid_argument if `branch_id` does not exceed every id
/// already present.
PathCondition append_constraint(const PathCondition &pc, const Constraint &c,
                                std::uint64_t branch_id);

struct SymState {
  Env env;
  PathCondition pc;
  int addr = 0;
  std::vector<int> loop_counters;
  int spec_depth = 0;
  std::uint64_t executed = 0;
  int quotients = 0;
  // Division results already decided for the instruction at `addr`,
  // keyed by post-order ordinal.
  std::map<int, LinearForm> resolved;
};

SymState initial_state(const Code &code);

struct NextState {
  SymState state;
};

struct BranchOutcome {
  SymState false_side;
  SymState true_side;
  Constraint false_constraint;
  Constraint true_constraint;
  std::uint64_t branch_id = 0;
  int instr = -1;
  bool equation = false;
};

struct PathEnd {
  SymState state;
  bool loop_bound_hit = false;
};

struct ErrorSite {
  std::string message;
  int instr = -1;
  int line = 0;
  SymState state;
  // Extra conjunct that must hold for the error (the zero divisor).
  std::optional<Constraint> extra;
  // The non-error side of a division fork.
  std::optional<SymState> continuation;
  std::optional<Constraint> continuation_constraint;
  std::uint64_t branch_id = 0;
};

using StepResult = std::variant<NextState, BranchOutcome, PathEnd, ErrorSite>;

struct StepContext {
  int loop_bound = 8;
  std::uint64_t next_branch_id = 1;
};

/// Executes the instruction at `s.addr`. Forks consume a branch id from the
/// context.
StepResult step(const SymState &s, const Code &code, StepContext &ctx);

} // namespace sse
