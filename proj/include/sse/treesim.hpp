//===-- treesim.hpp - Solver-call counting on labeled trees -----*- C++ -*-===//
//
// An execution tree whose branch sides are labeled feasible or infeasible
// stands in for a program plus solver. Infeasible sides have no subtree.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/search.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sse {

struct LabeledTree {
  // Side 0 is the false side, side 1 the true side. A feasible side points
  // to a node; an infeasible side has child -1.
  struct Node {
    bool branch = false;
    int child[2] = {-1, -1};
    bool feasible[2] = {true, true};
  };

  std::vector<Node> nodes;
  int root = 0;

  static LabeledTree leaf();
  int height() const;
  int branch_count() const;
  /// Throws std::invalid_argument on a malformed tree or a branch with both
  /// sides infeasible.
  void validate() const;
};

bool operator==(const LabeledTree &a, const LabeledTree &b);

LabeledTree full_tree(int height);

/// Reproducible for a fixed seed. At every branch the false side is drawn
/// infeasible with probability p; if it is, the true side is kept feasible,
/// otherwise the true side is drawn infeasible with probability p. Feasible
/// sides shallower than `height` become branches.
LabeledTree gen_random_tree(int height, double p, std::uint64_t seed);

/// Fraction of infeasible sides the generator produces on average.
double expected_infeasible_ratio(double p);

enum class ProbeVerdict { Sat, Unsat, Avoided };

struct Probe {
  std::string path; // side letters from the root, e.g. "TFF"
  int ordinal = 0;  // solver call number; 0 for an avoided query
  ProbeVerdict verdict = ProbeVerdict::Sat;
};

bool operator==(const Probe &a, const Probe &b);

struct SimResult {
  std::uint64_t total = 0;
  std::uint64_t sat = 0;
  std::uint64_t unsat = 0;
  std::uint64_t avoided = 0;
  std::vector<Probe> trace;
};

struct SimOptions {
  int depth = 1;
  Order order = Order::FalseFirst;
  bool optimize = false;
  bool absurdity_resets_depth = true;
};

SimResult simulate_pure(const LabeledTree &t, Order order = Order::FalseFirst,
                        bool optimize = false);
SimResult simulate_sse(const LabeledTree &t, const SimOptions &opts);

/// The closed form under test: 2^n for n <= k, otherwise
/// 2^n + (2^n - 2^(n mod k)) / (2^k - 1). Requires 1 <= n <= 30, k >= 1.
std::uint64_t eq1_formula(int n, int k);

/// Closed form that agrees with the simulator on full trees:
/// 2^(n mod k) replaced by 2^(((n-1) mod k) + 1).
std::uint64_t full_tree_count(int n, int k);

/// A nested-if program whose execution tree is `t`. The root must have two
/// feasible sides.
std::string program_for_tree(const LabeledTree &t);

} // namespace sse
