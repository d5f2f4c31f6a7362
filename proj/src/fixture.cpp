#include "sse/fixture.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

namespace sse {

namespace {

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
};

class Reader {
public:
  explicit Reader(std::string_view s) : s_(s) {}

  SExpr read() {
    skip();
    if (pos_ >= s_.size())
      throw FixtureError("unexpected end of fixture text");
    if (s_[pos_] == ')')
      throw FixtureError("unbalanced ')'");
    if (s_[pos_] == '(') {
      ++pos_;
      SExpr list;
      for (;;) {
        skip();
        if (pos_ >= s_.size())
          throw FixtureError("missing ')'");
        if (s_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ';')
      ++pos_;
    SExpr a;
    a.is_atom = true;
    a.atom = std::string(s_.substr(start, pos_ - start));
    return a;
  }

  void expect_end() {
    skip();
    if (pos_ != s_.size())
      throw FixtureError("trailing text after fixture");
  }

private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n')
          ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

const std::string &atom(const SExpr &e, const char *what) {
  if (!e.is_atom)
    throw FixtureError(std::string("expected an atom for ") + what);
  return e.atom;
}

std::uint64_t number(const SExpr &e, const char *what) {
  const std::string &a = atom(e, what);
  if (a.empty() || !std::all_of(a.begin(), a.end(), ::isdigit))
    throw FixtureError(std::string("expected a number for ") + what + ", got '" + a + "'");
  return std::stoull(a);
}

// Returns the node index, or -1 for `dead`.
int build_tree(LabeledTree &t, const SExpr &e) {
  if (e.is_atom) {
    if (e.atom == "dead")
      return -1;
    if (e.atom != "leaf")
      throw FixtureError("unknown tree atom '" + e.atom + "'");
    t.nodes.emplace_back();
    return static_cast<int>(t.nodes.size()) - 1;
  }
  if (e.items.size() != 3 || !e.items[0].is_atom || e.items[0].atom != "br")
    throw FixtureError("expected (br FALSE TRUE)");
  int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  t.nodes[id].branch = true;
  for (int s = 0; s < 2; ++s) {
    int c = build_tree(t, e.items[1 + s]);
    t.nodes[id].child[s] = c;
    t.nodes[id].feasible[s] = c >= 0;
  }
  return id;
}

LabeledTree tree_from(const SExpr &e) {
  LabeledTree t;
  int root = build_tree(t, e);
  if (root < 0)
    throw FixtureError("tree root cannot be dead");
  t.root = root;
  try {
    t.validate();
  } catch (const std::invalid_argument &ex) {
    throw FixtureError(ex.what());
  }
  return t;
}

void write_tree(std::ostringstream &os, const LabeledTree &t, int n) {
  const auto &node = t.nodes[n];
  if (!node.branch) {
    os << "leaf";
    return;
  }
  os << "(br";
  for (int s = 0; s < 2; ++s) {
    os << " ";
    if (node.feasible[s])
      write_tree(os, t, node.child[s]);
    else
      os << "dead";
  }
  os << ")";
}

std::string_view verdict_name(ProbeVerdict v) {
  switch (v) {
  case ProbeVerdict::Sat: return "sat";
  case ProbeVerdict::Unsat: return "unsat";
  case ProbeVerdict::Avoided: return "avoided";
  }
  return "?";
}

std::string describe(const Probe &p) {
  return "(" + p.path + " " + (p.ordinal ? std::to_string(p.ordinal) : "*") + " " +
         std::string(verdict_name(p.verdict)) + ")";
}

} // namespace

LabeledTree parse_tree(std::string_view text) {
  Reader r(text);
  SExpr e = r.read();
  r.expect_end();
  return tree_from(e);
}

std::string serialize_tree(const LabeledTree &t) {
  std::ostringstream os;
  write_tree(os, t, t.root);
  return os.str();
}

Fixture parse_fixture(std::string_view text) {
  Reader r(text);
  SExpr top = r.read();
  r.expect_end();
  if (top.is_atom || top.items.size() < 2 || atom(top.items[0], "header") != "fixture")
    throw FixtureError("expected (fixture NAME ...)");
  Fixture f;
  f.name = atom(top.items[1], "fixture name");
  bool have_tree = false;
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr &clause = top.items[i];
    if (clause.is_atom || clause.items.empty())
      throw FixtureError("expected a (key value) clause");
    const std::string &key = atom(clause.items[0], "clause key");
    auto arg = [&](std::size_t j) -> const SExpr & {
      if (clause.items.size() <= j)
        throw FixtureError("clause '" + key + "' is missing an argument");
      return clause.items[j];
    };
    if (key == "tree") {
      f.tree = tree_from(arg(1));
      have_tree = true;
    } else if (key == "strategy") {
      try {
        f.strategy = parse_strategy(atom(arg(1), "strategy"));
      } catch (const std::invalid_argument &e) {
        throw FixtureError(e.what());
      }
    } else if (key == "depth") {
      f.depth = static_cast<int>(number(arg(1), "depth"));
    } else if (key == "order") {
      try {
        f.order = parse_order(atom(arg(1), "order"));
      } catch (const std::invalid_argument &e) {
        throw FixtureError(e.what());
      }
    } else if (key == "optimize") {
      const std::string &v = atom(arg(1), "optimize");
      if (v != "on" && v != "off")
        throw FixtureError("optimize must be on or off");
      f.optimize = v == "on";
    } else if (key == "expect") {
      for (std::size_t j = 1; j < clause.items.size(); ++j) {
        const SExpr &kv = clause.items[j];
        if (kv.is_atom || kv.items.size() != 2)
          throw FixtureError("expected (counter N) in expect");
        const std::string &name = atom(kv.items[0], "counter");
        std::uint64_t v = number(kv.items[1], "counter value");
        if (name == "total")
          f.total = v;
        else if (name == "sat")
          f.sat = v;
        else if (name == "unsat")
          f.unsat = v;
        else if (name == "avoided")
          f.avoided = v;
        else
          throw FixtureError("unknown counter '" + name + "'");
      }
    } else if (key == "trace") {
      for (std::size_t j = 1; j < clause.items.size(); ++j) {
        const SExpr &p = clause.items[j];
        if (p.is_atom || p.items.size() != 3)
          throw FixtureError("expected (PATH ORDINAL VERDICT) in trace");
        Probe probe;
        probe.path = atom(p.items[0], "probe path");
        const std::string &ord = atom(p.items[1], "probe ordinal");
        probe.ordinal = ord == "*" ? 0 : static_cast<int>(number(p.items[1], "ordinal"));
        const std::string &v = atom(p.items[2], "probe verdict");
        if (v == "sat")
          probe.verdict = ProbeVerdict::Sat;
        else if (v == "unsat")
          probe.verdict = ProbeVerdict::Unsat;
        else if (v == "avoided")
          probe.verdict = ProbeVerdict::Avoided;
        else
          throw FixtureError("unknown verdict '" + v + "'");
        f.trace.push_back(std::move(probe));
      }
    } else {
      throw FixtureError("unknown clause '" + key + "'");
    }
  }
  if (!have_tree)
    throw FixtureError("fixture has no tree");
  if (f.depth < 1)
    throw FixtureError("depth must be at least 1");
  return f;
}

std::string serialize_fixture(const Fixture &f) {
  std::ostringstream os;
  os << "(fixture " << f.name << "\n";
  os << "  (tree " << serialize_tree(f.tree) << ")\n";
  os << "  (strategy " << to_string(f.strategy) << ") (depth " << f.depth
     << ") (order " << to_string(f.order) << ") (optimize "
     << (f.optimize ? "on" : "off") << ")\n";
  os << "  (expect (total " << f.total << ") (sat " << f.sat << ") (unsat " << f.unsat
     << ") (avoided " << f.avoided << "))\n";
  os << "  (trace";
  for (const Probe &p : f.trace)
    os << "\n    " << describe(p);
  os << "))\n";
  return os.str();
}

const std::vector<std::string> &fixture_names() {
  static const std::vector<std::string> names = {"fig3a", "fig3b", "fig4a", "fig4b",
                                                 "fig7"};
  return names;
}

Fixture load_fixture(const std::string &name, const std::string &dir) {
  const auto &names = fixture_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw FixtureError("unknown fixture '" + name + "'");
  std::string path = dir + "/" + name + ".sexp";
  std::ifstream in(path);
  if (!in)
    throw FixtureError("cannot open fixture file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fixture(ss.str());
}

ReplayOutcome replay(const Fixture &f) {
  ReplayOutcome out;
  out.fixture = f;
  if (f.strategy == Strategy::Pure)
    out.result = simulate_pure(f.tree, f.order, f.optimize);
  else
    out.result = simulate_sse(f.tree, SimOptions{f.depth, f.order, f.optimize, true});
  const SimResult &r = out.result;
  auto counter = [&](const char *name, std::uint64_t want, std::uint64_t got) {
    if (out.first_difference.empty() && want != got)
      out.first_difference = std::string(name) + ": expected " + std::to_string(want) +
                             ", got " + std::to_string(got);
  };
  counter("total", f.total, r.total);
  counter("sat", f.sat, r.sat);
  counter("unsat", f.unsat, r.unsat);
  counter("avoided", f.avoided, r.avoided);
  if (out.first_difference.empty()) {
    std::size_t n = std::max(f.trace.size(), r.trace.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i < f.trace.size() && i < r.trace.size() && f.trace[i] == r.trace[i])
        continue;
      out.first_difference =
          "probe " + std::to_string(i + 1) + ": expected " +
          (i < f.trace.size() ? describe(f.trace[i]) : std::string("nothing")) +
          ", got " + (i < r.trace.size() ? describe(r.trace[i]) : std::string("nothing"));
      break;
    }
  }
  out.pass = out.first_difference.empty();
  return out;
}

ReplayOutcome replay_fixture(const std::string &name, const std::string &dir) {
  return replay(load_fixture(name, dir));
}

} // namespace sse
