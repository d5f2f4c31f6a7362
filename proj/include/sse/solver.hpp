//===-- solver.hpp - Linear integer feasibility -----------------*- C++ -*-===//
//
// Every symbol ranges over a bounded domain (default [-64, 63]). Within that
// bound the built-in procedure is sound and complete.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/constraint.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sse {

enum class SolverStatus { Sat, Unsat };

struct SolverVerdict {
  SolverStatus status = SolverStatus::Unsat;
  Model model;
  double seconds = 0;

  bool sat() const { return status == SolverStatus::Sat; }
};

/// The query could not be decided (capacity, overflow, timeout, external
/// process failure). Never a synonym for unsat.
class SolverException : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  std::int64_t domain_lo = -64;
  std::int64_t domain_hi = 63;
  std::size_t max_vars = 32;
  std::size_t max_rows = 20000;
  std::uint64_t max_nodes = 200000;
  // Largest domain^vars product the enumeration fallback will walk.
  std::uint64_t enum_limit = std::uint64_t(1) << 22;
};

class Solver {
public:
  virtual ~Solver() = default;
  virtual SolverVerdict solve(const std::vector<Constraint> &constraints) = 0;
  virtual std::string name() const = 0;
};

/// Fourier-Motzkin projection with integer tightening, value search guided
/// by the projections, lazy case splits for `!=`.
class BuiltinSolver : public Solver {
public:
  explicit BuiltinSolver(SolverOptions opts = {}) : opts_(opts) {}
  SolverVerdict solve(const std::vector<Constraint> &constraints) override;
  std::string name() const override { return "builtin"; }
  const SolverOptions &options() const { return opts_; }

private:
  SolverOptions opts_;
};

/// Runs an SMT-LIB speaking process per query, e.g. "/usr/bin/z3 -in".
class ExternalSolver : public Solver {
public:
  ExternalSolver(std::string command, SolverOptions opts = {},
                 double timeout_seconds = 5.0);
  SolverVerdict solve(const std::vector<Constraint> &constraints) override;
  std::string name() const override { return "external:" + command_; }

private:
  std::string command_;
  SolverOptions opts_;
  double timeout_;
};

/// "builtin" or "external:<command line>".
std::unique_ptr<Solver> make_solver(const std::string &spec,
                                    const SolverOptions &opts = {});

/// QF_LIA query text with check-sat and get-model. When `domain` is given
/// every declared symbol is bounded by it.
std::string emit_external_query(
    const std::vector<Constraint> &constraints,
    std::optional<std::pair<std::int64_t, std::int64_t>> domain = std::nullopt);

/// Parses "sat"/"unsat" plus define-fun model lines. Throws SolverException
/// on anything else.
SolverVerdict parse_external_reply(const std::string &reply);

struct SideInfo {
  bool true_side = true;
  bool equation = false;
};

struct SolverStats {
  std::uint64_t sat = 0;
  std::uint64_t unsat = 0;
  std::uint64_t total = 0;
  std::uint64_t exceptions = 0;
  std::uint64_t avoided = 0;
  double seconds = 0;
  // [feasible][true side][equation]
  std::uint64_t sides[2][2][2] = {};

  std::uint64_t side_count(bool feasible, bool true_side, bool equation) const {
    return sides[feasible][true_side][equation];
  }
};

bool operator==(const SolverStats &a, const SolverStats &b);

/// Solves and records exactly one invocation. An exception is recorded in
/// `exceptions` and rethrown.
SolverVerdict counted_solve(SolverStats &stats, Solver &solver,
                            const std::vector<Constraint> &constraints,
                            SideInfo side);

} // namespace sse
