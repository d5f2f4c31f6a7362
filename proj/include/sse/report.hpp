//===-- report.hpp - Run reports and sweep tables ---------------*- C++ -*-===//
#pragma once

#include "sse/search.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sse {

using Json = nlohmann::ordered_json;

struct Savings {
  std::string baseline;
  double calls_percent = 0;        // fewer solver calls than the baseline
  double time_percent = 0;         // wall time
  double solving_time_percent = 0;
  std::int64_t extra_instructions = 0;
};

struct RunReport {
  std::string program;
  std::string solver = "builtin";
  SearchConfig config;
  SolverStats stats;
  std::uint64_t leaves = 0;
  std::uint64_t pruned = 0;
  std::vector<BugReport> bugs;
  std::uint64_t executed = 0;
  double wall_seconds = 0;
  std::optional<Savings> savings;
  std::string status = "clean"; // clean | bugs | solver-exception
  std::string error;            // set for solver-exception
};

RunReport make_report(const ExplorationRecord &rec, const SearchConfig &cfg,
                      const std::string &program, const std::string &solver,
                      double wall_seconds);

void attach_savings(RunReport &r, const RunReport &baseline, const std::string &name);

Json to_json(const Constraint &c);
Constraint constraint_from_json(const Json &j);
Json to_json(const SearchConfig &c);
SearchConfig config_from_json(const Json &j);
Json to_json(const SolverStats &s);
SolverStats stats_from_json(const Json &j);
Json to_json(const RunReport &r);
RunReport report_from_json(const Json &j);

/// Report JSON with timing fields zeroed, for determinism checks.
Json without_timing(Json j);

struct SweepRow {
  int depth = 1;
  Order order = Order::TrueFirst;
  bool optimize = false;
  std::uint64_t total = 0;
  std::uint64_t sat = 0;
  std::uint64_t unsat = 0;
  std::uint64_t avoided = 0;
  std::uint64_t pure_total = 0;
  std::uint64_t bugs = 0;
  // total / pure_total * 100, pure run with the same order and optimize
  double percent = 0;
  // against unoptimized pure
  std::uint64_t plain_pure_total = 0;
  double percent_plain = 0;
};

bool operator==(const SweepRow &a, const SweepRow &b);

Json to_json(const std::vector<SweepRow> &rows);
std::string to_csv(const std::vector<SweepRow> &rows);

} // namespace sse
