//===-- fixture.hpp - Worked-example tree fixtures --------------*- C++ -*-===//
//
// A fixture is one S-expression:
//
//   (fixture NAME
//     (tree TREE)                       ; TREE := leaf | dead | (br FALSE TRUE)
//     (strategy pure|sse) (depth K) (order false-first|true-first)
//     (optimize on|off)
//     (expect (total N) (sat N) (unsat N) (avoided N))
//     (trace (PATH ORDINAL VERDICT) ...)) ; ORDINAL is * for avoided queries
//
// `dead` marks an infeasible side. `;` starts a comment.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "sse/treesim.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sse {

struct Fixture {
  std::string name;
  LabeledTree tree;
  Strategy strategy = Strategy::Speculative;
  int depth = 1;
  Order order = Order::FalseFirst;
  bool optimize = false;
  std::uint64_t total = 0, sat = 0, unsat = 0, avoided = 0;
  std::vector<Probe> trace;
};

class FixtureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Fixture parse_fixture(std::string_view text);
std::string serialize_fixture(const Fixture &f);

/// Tree syntax alone, e.g. "(br leaf dead)".
LabeledTree parse_tree(std::string_view text);
std::string serialize_tree(const LabeledTree &t);

const std::vector<std::string> &fixture_names();

/// Reads `<dir>/<name>.sexp`. Throws FixtureError for an unknown name.
Fixture load_fixture(const std::string &name, const std::string &dir = SSE_FIXTURE_DIR);

struct ReplayOutcome {
  Fixture fixture;
  SimResult result;
  bool pass = false;
  std::string first_difference;
};

ReplayOutcome replay(const Fixture &f);
ReplayOutcome replay_fixture(const std::string &name,
                             const std::string &dir = SSE_FIXTURE_DIR);

} // namespace sse
