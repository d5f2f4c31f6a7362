//===-- parallel.hpp - Batch kernels ----------------------------*- C++ -*-===//
//
// Each kernel has a serial reference and an OpenMP version that must agree
// with it exactly. Every unit of work owns its own solver and state.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/report.hpp"
#include "sse/search.hpp"
#include "sse/solver.hpp"
#include "sse/treesim.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace sse {

//===----------------------------------------------------------------------===//
// Random trees: simulated speculative vs pure counts
//===----------------------------------------------------------------------===//

struct TreeCase {
  int height = 1;
  double p = 0;
  std::uint64_t seed = 0;
};

/// `count` cases with heights cycling 1..max_height and probabilities
/// cycling through `ps`, seeds derived from `seed`.
std::vector<TreeCase> make_tree_cases(std::size_t count, int max_height,
                                      const std::vector<double> &ps,
                                      std::uint64_t seed);

struct RatioSummary {
  std::uint64_t comparisons = 0;
  std::uint64_t violations = 0; // sse * 2 <= pure
  double min_ratio = 0;         // smallest sse / pure seen
  TreeCase worst;
  int worst_depth = 0;
  Order worst_order = Order::FalseFirst;
};

bool operator==(const RatioSummary &a, const RatioSummary &b);

/// Unoptimized simulations for every k in 1..max_depth and both orders.
RatioSummary ratio_batch_serial(const std::vector<TreeCase> &cases, int max_depth);
RatioSummary ratio_batch_parallel(const std::vector<TreeCase> &cases, int max_depth);

//===----------------------------------------------------------------------===//
// Full-tree grid
//===----------------------------------------------------------------------===//

struct GridCell {
  int n = 0;
  int k = 0;
  std::uint64_t simulated = 0;
  std::uint64_t formula = 0;
  std::uint64_t corrected = 0;
};

std::vector<GridCell> eq1_grid_serial(int max_n, int max_k);
std::vector<GridCell> eq1_grid_parallel(int max_n, int max_k);

//===----------------------------------------------------------------------===//
// Depth sweeps over a program
//===----------------------------------------------------------------------===//

using SolverFactory = std::function<std::unique_ptr<Solver>()>;

struct SweepSpec {
  std::vector<int> depths;
  std::vector<Order> orders;
  std::vector<bool> optimize;
  bool recheck = true;
  int loop_bound = 8;
};

/// Row order: depth-major, then order, then optimize. The pure baseline is
/// run once per (order, optimize) pair. Throws SearchAborted on a solver
/// exception.
std::vector<SweepRow> sweep_serial(const Code &code, const SweepSpec &spec,
                                   const SolverFactory &make);
std::vector<SweepRow> sweep_parallel(const Code &code, const SweepSpec &spec,
                                     const SolverFactory &make);

//===----------------------------------------------------------------------===//
// Random conjunctions
//===----------------------------------------------------------------------===//

struct ConjunctionSpec {
  int max_vars = 4;
  int max_coeff = 8;
  int max_conjuncts = 6;
  int max_rhs = 16;
};

std::vector<Constraint> random_conjunction(std::uint64_t seed,
                                           const ConjunctionSpec &spec = {});

/// Built-in verdicts for many queries; sat verdicts carry models.
std::vector<SolverVerdict> solve_batch_serial(
    const std::vector<std::vector<Constraint>> &queries, const SolverOptions &opts);
std::vector<SolverVerdict> solve_batch_parallel(
    const std::vector<std::vector<Constraint>> &queries, const SolverOptions &opts);

} // namespace sse
