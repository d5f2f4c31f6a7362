#include "sse/report.hpp"

#include <iomanip>
#include <sstream>

namespace sse {

RunReport make_report(const ExplorationRecord &rec, const SearchConfig &cfg,
                      const std::string &program, const std::string &solver,
                      double wall_seconds) {
  RunReport r;
  r.program = program;
  r.solver = solver;
  r.config = cfg;
  r.stats = rec.stats;
  for (const Leaf &l : rec.leaves)
    (l.kind == LeafKind::Pruned ? r.pruned : r.leaves)++;
  r.bugs = rec.bugs;
  r.executed = rec.executed;
  r.wall_seconds = wall_seconds;
  r.status = rec.bugs.empty() ? "clean" : "bugs";
  return r;
}

static double percent_saved(double base, double now) {
  return base == 0 ? 0 : (base - now) / base * 100.0;
}

void attach_savings(RunReport &r, const RunReport &baseline, const std::string &name) {
  Savings s;
  s.baseline = name;
  s.calls_percent = percent_saved(static_cast<double>(baseline.stats.total),
                                  static_cast<double>(r.stats.total));
  s.time_percent = percent_saved(baseline.wall_seconds, r.wall_seconds);
  s.solving_time_percent = percent_saved(baseline.stats.seconds, r.stats.seconds);
  s.extra_instructions =
      static_cast<std::int64_t>(r.executed) - static_cast<std::int64_t>(baseline.executed);
  r.savings = s;
}

Json to_json(const Constraint &c) {
  Json j;
  Json coeffs = Json::object();
  for (const auto &[name, v] : c.coeffs)
    coeffs[name] = v;
  j["coeffs"] = coeffs;
  j["rel"] = std::string(to_string(c.rel));
  j["rhs"] = c.rhs;
  j["text"] = to_string(c);
  return j;
}

static Rel rel_from(const std::string &s) {
  for (Rel r : {Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge, Rel::Eq, Rel::Ne})
    if (to_string(r) == s)
      return r;
  throw std::invalid_argument("unknown relation '" + s + "'");
}

Constraint constraint_from_json(const Json &j) {
  Constraint c;
  for (const auto &[name, v] : j.at("coeffs").items())
    c.coeffs[name] = v.get<std::int64_t>();
  c.rel = rel_from(j.at("rel").get<std::string>());
  c.rhs = j.at("rhs").get<std::int64_t>();
  return c;
}

Json to_json(const SearchConfig &c) {
  Json j;
  j["strategy"] = std::string(to_string(c.strategy));
  j["depth"] = c.depth;
  j["order"] = std::string(to_string(c.order));
  j["optimize"] = c.optimize;
  j["recheck"] = c.recheck;
  j["loop_bound"] = c.loop_bound;
  j["absurdity_resets_depth"] = c.absurdity_resets_depth;
  return j;
}

SearchConfig config_from_json(const Json &j) {
  SearchConfig c;
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.depth = j.at("depth").get<int>();
  c.order = parse_order(j.at("order").get<std::string>());
  c.optimize = j.at("optimize").get<bool>();
  c.recheck = j.at("recheck").get<bool>();
  c.loop_bound = j.at("loop_bound").get<int>();
  c.absurdity_resets_depth = j.at("absurdity_resets_depth").get<bool>();
  return c;
}

static const char *feasible_key(int f) { return f ? "feasible" : "infeasible"; }
static const char *side_key(int t) { return t ? "true_side" : "false_side"; }
static const char *eq_key(int e) { return e ? "equation" : "inequation"; }

Json to_json(const SolverStats &s) {
  Json j;
  j["sat"] = s.sat;
  j["unsat"] = s.unsat;
  j["total"] = s.total;
  j["exceptions"] = s.exceptions;
  j["avoided"] = s.avoided;
  j["solving_seconds"] = s.seconds;
  Json sides;
  for (int f = 1; f >= 0; --f)
    for (int t = 1; t >= 0; --t)
      for (int e = 1; e >= 0; --e)
        sides[feasible_key(f)][side_key(t)][eq_key(e)] = s.sides[f][t][e];
  j["sides"] = sides;
  return j;
}

SolverStats stats_from_json(const Json &j) {
  SolverStats s;
  s.sat = j.at("sat").get<std::uint64_t>();
  s.unsat = j.at("unsat").get<std::uint64_t>();
  s.total = j.at("total").get<std::uint64_t>();
  s.exceptions = j.at("exceptions").get<std::uint64_t>();
  s.avoided = j.at("avoided").get<std::uint64_t>();
  s.seconds = j.at("solving_seconds").get<double>();
  const Json &sides = j.at("sides");
  for (int f = 0; f < 2; ++f)
    for (int t = 0; t < 2; ++t)
      for (int e = 0; e < 2; ++e)
        s.sides[f][t][e] =
            sides.at(feasible_key(f)).at(side_key(t)).at(eq_key(e)).get<std::uint64_t>();
  return s;
}

Json to_json(const RunReport &r) {
  Json j;
  j["program"] = r.program;
  j["solver"] = r.solver;
  j["config"] = to_json(r.config);
  j["status"] = r.status;
  if (!r.error.empty())
    j["error"] = r.error;
  j["stats"] = to_json(r.stats);
  j["leaves"] = r.leaves;
  j["pruned"] = r.pruned;
  j["executed_instructions"] = r.executed;
  j["wall_seconds"] = r.wall_seconds;
  Json bugs = Json::array();
  for (const BugReport &b : r.bugs) {
    Json jb;
    jb["message"] = b.message;
    jb["instr"] = b.instr;
    jb["line"] = b.line;
    jb["verified"] = b.verified;
    Json pc = Json::array();
    for (const Constraint &c : b.pc)
      pc.push_back(to_json(c));
    jb["path_condition"] = pc;
    Json w = Json::object();
    for (const auto &[name, v] : b.witness)
      w[name] = v;
    jb["witness"] = w;
    bugs.push_back(jb);
  }
  j["bugs"] = bugs;
  if (r.savings) {
    Json s;
    s["baseline"] = r.savings->baseline;
    s["calls_percent"] = r.savings->calls_percent;
    s["time_percent"] = r.savings->time_percent;
    s["solving_time_percent"] = r.savings->solving_time_percent;
    s["extra_instructions"] = r.savings->extra_instructions;
    j["savings"] = s;
  }
  return j;
}

RunReport report_from_json(const Json &j) {
  RunReport r;
  r.program = j.at("program").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.status = j.at("status").get<std::string>();
  if (j.contains("error"))
    r.error = j.at("error").get<std::string>();
  r.stats = stats_from_json(j.at("stats"));
  r.leaves = j.at("leaves").get<std::uint64_t>();
  r.pruned = j.at("pruned").get<std::uint64_t>();
  r.executed = j.at("executed_instructions").get<std::uint64_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  for (const Json &jb : j.at("bugs")) {
    BugReport b;
    b.message = jb.at("message").get<std::string>();
    b.instr = jb.at("instr").get<int>();
    b.line = jb.at("line").get<int>();
    b.verified = jb.at("verified").get<bool>();
    for (const Json &c : jb.at("path_condition"))
      b.pc.push_back(constraint_from_json(c));
    for (const auto &[name, v] : jb.at("witness").items())
      b.witness[name] = v.get<std::int64_t>();
    r.bugs.push_back(std::move(b));
  }
  if (j.contains("savings")) {
    const Json &s = j.at("savings");
    Savings sv;
    sv.baseline = s.at("baseline").get<std::string>();
    sv.calls_percent = s.at("calls_percent").get<double>();
    sv.time_percent = s.at("time_percent").get<double>();
    sv.solving_time_percent = s.at("solving_time_percent").get<double>();
    sv.extra_instructions = s.at("extra_instructions").get<std::int64_t>();
    r.savings = sv;
  }
  return r;
}

Json without_timing(Json j) {
  if (j.contains("wall_seconds"))
    j["wall_seconds"] = 0.0;
  if (j.contains("stats"))
    j["stats"]["solving_seconds"] = 0.0;
  if (j.contains("savings")) {
    j["savings"]["time_percent"] = 0.0;
    j["savings"]["solving_time_percent"] = 0.0;
  }
  return j;
}

bool operator==(const SweepRow &a, const SweepRow &b) {
  return a.depth == b.depth && a.order == b.order && a.optimize == b.optimize &&
         a.total == b.total && a.sat == b.sat && a.unsat == b.unsat &&
         a.avoided == b.avoided && a.pure_total == b.pure_total && a.bugs == b.bugs &&
         a.plain_pure_total == b.plain_pure_total;
}

Json to_json(const std::vector<SweepRow> &rows) {
  Json out = Json::array();
  for (const SweepRow &r : rows) {
    Json j;
    j["depth"] = r.depth;
    j["order"] = std::string(to_string(r.order));
    j["optimize"] = r.optimize;
    j["total"] = r.total;
    j["sat"] = r.sat;
    j["unsat"] = r.unsat;
    j["avoided"] = r.avoided;
    j["bugs"] = r.bugs;
    j["pure_total"] = r.pure_total;
    j["percent"] = r.percent;
    j["plain_pure_total"] = r.plain_pure_total;
    j["percent_plain"] = r.percent_plain;
    out.push_back(j);
  }
  return out;
}

std::string to_csv(const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  os << "depth,order,optimize,total,sat,unsat,avoided,bugs,pure_total,percent,plain_pure_total,percent_plain\n";
  for (const SweepRow &r : rows)
    os << r.depth << "," << to_string(r.order) << "," << (r.optimize ? "on" : "off")
       << "," << r.total << "," << r.sat << "," << r.unsat << "," << r.avoided << ","
       << r.bugs << "," << r.pure_total << "," << std::fixed << std::setprecision(2)
       << r.percent << "," << r.plain_pure_total << "," << r.percent_plain
       << std::defaultfloat << "\n";
  return os.str();
}

} // namespace sse
