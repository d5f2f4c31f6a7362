#include "sse/search.hpp"

#include <algorithm>
#include <set>

namespace sse {

std::string_view to_string(Strategy s) {
  return s == Strategy::Pure ? "pure" : "sse";
}

std::string_view to_string(Order o) {
  return o == Order::FalseFirst ? "false-first" : "true-first";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "pure")
    return Strategy::Pure;
  if (s == "sse" || s == "speculative")
    return Strategy::Speculative;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

Order parse_order(std::string_view s) {
  if (s == "false-first")
    return Order::FalseFirst;
  if (s == "true-first")
    return Order::TrueFirst;
  throw std::invalid_argument("unknown order '" + std::string(s) + "'");
}

std::string_view to_string(LeafKind k) {
  switch (k) {
  case LeafKind::Normal: return "normal";
  case LeafKind::Error: return "error";
  case LeafKind::Pruned: return "pruned";
  }
  return "?";
}

std::string_view to_string(QueryPurpose p) {
  switch (p) {
  case QueryPurpose::Side: return "side";
  case QueryPurpose::PathEnd: return "path-end";
  case QueryPurpose::ErrorSite: return "error-site";
  case QueryPurpose::Probe: return "probe";
  case QueryPurpose::Scan: return "scan";
  }
  return "?";
}

void AbsurdityLedger::record(std::uint64_t branch_id, bool infeasible_side) {
  auto [it, inserted] = entries_.emplace(branch_id, infeasible_side);
  if (!inserted && it->second != infeasible_side)
    throw std::logic_error("both sides of branch " + std::to_string(branch_id) +
                           " recorded infeasible");
}

std::optional<bool> AbsurdityLedger::infeasible_side(std::uint64_t branch_id) const {
  auto it = entries_.find(branch_id);
  if (it == entries_.end())
    return std::nullopt;
  return it->second;
}

Absurdity apply_absurdity(const AbsurdityLedger &ledger, std::uint64_t branch_id,
                          bool side) {
  auto s = ledger.infeasible_side(branch_id);
  return s && *s == !side ? Absurdity::KnownFeasible : Absurdity::Unknown;
}

BisectResult backtrack_binary_search(int m,
                                     const std::function<bool(int)> &prefix_feasible) {
  if (m < 1)
    throw std::invalid_argument("segment length must be positive");
  BisectResult r{m, 0};
  int lo = 1, hi = m - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    ++r.probes;
    if (prefix_feasible(mid)) {
      lo = mid + 1;
    } else {
      r.first_bad = mid;
      hi = mid - 1;
    }
  }
  return r;
}

namespace {

std::vector<Constraint> with_extra(const PathCondition &pc, const Constraint &c) {
  auto v = pc.constraints();
  v.push_back(c);
  return v;
}

// State shared by both strategies: counting, logging, bug reports.
class EngineBase {
protected:
  EngineBase(const Code &code, const SearchConfig &cfg, Solver &solver)
      : code_(code), cfg_(cfg), solver_(solver) {
    ctx_.loop_bound = cfg.loop_bound;
    if (cfg.loop_bound < 0)
      throw std::invalid_argument("loop bound must be non-negative");
  }

  SolverVerdict query(const std::vector<Constraint> &cs, SideInfo side,
                      QueryPurpose purpose) {
    SolverVerdict v = counted_solve(rec_.stats, solver_, cs, side);
    rec_.queries.push_back(QueryRecord{cs, v.status, purpose, side});
    return v;
  }

  void leaf(LeafKind kind, std::vector<Constraint> pc, int instr = -1,
            std::string message = {}) {
    rec_.leaves.push_back(Leaf{kind, std::move(pc), instr, std::move(message)});
  }

  Model complete(Model m) const {
    for (const auto &in : code_.inputs)
      m.emplace(in, 0);
    return m;
  }

  void report(const ErrorSite &site, const std::vector<Constraint> &pc,
              std::optional<Model> witness, bool verified) {
    auto key = std::make_pair(site.instr, site.message);
    if (!reported_.insert(key).second)
      return;
    if (verified && !witness) {
      // Witness only: not part of the feasibility accounting.
      try {
        SolverVerdict v = solver_.solve(pc);
        if (v.sat())
          witness = v.model;
      } catch (const SolverException &) {
      }
    }
    BugReport b;
    b.message = site.message;
    b.instr = site.instr;
    b.line = site.line;
    b.pc = pc;
    b.witness = complete(witness.value_or(Model{}));
    b.verified = verified;
    rec_.bugs.push_back(std::move(b));
  }

  void count_step(const SymState &before, const StepResult &r) {
    std::visit(
        [&](const auto &x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, NextState>)
            rec_.executed += x.state.executed - before.executed;
          else if constexpr (std::is_same_v<T, BranchOutcome>)
            rec_.executed += 1;
          else if constexpr (std::is_same_v<T, PathEnd>)
            rec_.executed += x.state.executed - before.executed;
          else
            rec_.executed += x.state.executed - before.executed;
        },
        r);
  }

  [[noreturn]] void abort(const std::vector<Constraint> &pc, const std::string &why) {
    throw SearchAborted("solver exception: " + why, pc, std::move(rec_));
  }

  const Code &code_;
  SearchConfig cfg_;
  Solver &solver_;
  StepContext ctx_;
  ExplorationRecord rec_;
  std::set<std::pair<int, std::string>> reported_;
};

//===----------------------------------------------------------------------===//
// Pure DFS: every branch side is checked as soon as it is taken.
//===----------------------------------------------------------------------===//

class PureEngine : EngineBase {
public:
  PureEngine(const Code &code, const SearchConfig &cfg, Solver &solver)
      : EngineBase(code, cfg, solver) {}

  ExplorationRecord run() {
    explore(initial_state(code_), Model{});
    return std::move(rec_);
  }

private:
  SolverVerdict checked(const std::vector<Constraint> &cs, SideInfo side,
                        QueryPurpose purpose) {
    try {
      return query(cs, side, purpose);
    } catch (const SolverException &e) {
      abort(cs, e.what());
    }
  }

  // `model`, when present, satisfies s.pc.
  void explore(SymState s, std::optional<Model> model) {
    for (;;) {
      StepResult r = step(s, code_, ctx_);
      count_step(s, r);
      if (auto *n = std::get_if<NextState>(&r)) {
        s = std::move(n->state);
        continue;
      }
      if (auto *e = std::get_if<PathEnd>(&r)) {
        leaf(LeafKind::Normal, e->state.pc.constraints());
        return;
      }
      if (auto *site = std::get_if<ErrorSite>(&r)) {
        on_error(*site, model);
        return;
      }
      auto &b = std::get<BranchOutcome>(r);
      bool true_first = cfg_.order == Order::TrueFirst;
      bool first_infeasible = false;
      for (int i = 0; i < 2; ++i) {
        bool side = (i == 0) == true_first;
        SymState &next = side ? b.true_side : b.false_side;
        if (i == 1 && cfg_.optimize && first_infeasible) {
          ++rec_.stats.avoided;
          rec_.ledger_confirmed.push_back(next.pc.constraints());
          explore(std::move(next), std::nullopt);
          continue;
        }
        auto cs = next.pc.constraints();
        SolverVerdict v = checked(cs, SideInfo{side, b.equation}, QueryPurpose::Side);
        if (v.sat()) {
          explore(std::move(next), v.model);
        } else {
          leaf(LeafKind::Pruned, std::move(cs), b.instr);
          first_infeasible = i == 0;
        }
      }
      return;
    }
  }

  void on_error(ErrorSite &site, std::optional<Model> model) {
    if (!site.extra) {
      report(site, site.state.pc.constraints(), model, true);
      leaf(LeafKind::Error, site.state.pc.constraints(), site.instr, site.message);
      return;
    }
    auto err = with_extra(site.state.pc, *site.extra);
    SolverVerdict v = checked(err, SideInfo{true, true}, QueryPurpose::ErrorSite);
    bool error_infeasible = !v.sat();
    if (v.sat()) {
      report(site, err, v.model, true);
      leaf(LeafKind::Error, err, site.instr, site.message);
    } else {
      leaf(LeafKind::Pruned, err, site.instr, site.message);
    }
    SymState &cont = *site.continuation;
    if (cfg_.optimize && error_infeasible) {
      ++rec_.stats.avoided;
      rec_.ledger_confirmed.push_back(cont.pc.constraints());
      explore(std::move(cont), std::nullopt);
      return;
    }
    auto cs = cont.pc.constraints();
    SolverVerdict c = checked(cs, SideInfo{false, true}, QueryPurpose::Side);
    if (c.sat())
      explore(std::move(cont), c.model);
    else
      leaf(LeafKind::Pruned, std::move(cs), site.instr);
  }
};

//===----------------------------------------------------------------------===//
// Speculative DFS
//===----------------------------------------------------------------------===//

class SpeculativeEngine : EngineBase {
public:
  SpeculativeEngine(const Code &code, const SearchConfig &cfg, Solver &solver)
      : EngineBase(code, cfg, solver) {
    if (cfg.depth < 1)
      throw std::invalid_argument("speculation depth must be at least 1");
  }

  ExplorationRecord run() {
    std::optional<SymState> cur = initial_state(code_);
    for (;;) {
      if (!cur) {
        cur = backtrack();
        if (!cur)
          break;
      }
      StepResult r = step(*cur, code_, ctx_);
      count_step(*cur, r);
      if (auto *n = std::get_if<NextState>(&r)) {
        cur = std::move(n->state);
      } else if (auto *b = std::get_if<BranchOutcome>(&r)) {
        push_branch(std::move(*b));
        cur = enter_current();
      } else if (auto *e = std::get_if<PathEnd>(&r)) {
        on_path_end(e->state);
        cur.reset();
      } else {
        cur = on_error(std::get<ErrorSite>(r));
      }
    }
    return std::move(rec_);
  }

private:
  struct Side {
    bool side;
    SymState state;
  };

  struct Frame {
    std::uint64_t branch_id;
    bool equation;
    int instr;
    std::vector<Side> sides;
    std::size_t cursor = 0;

    Side &current() { return sides[cursor]; }
  };

  std::size_t depth() const { return frames_.size() - confirmed_; }

  void push_branch(BranchOutcome b) {
    Frame f{b.branch_id, b.equation, b.instr, {}, 0};
    if (cfg_.order == Order::TrueFirst) {
      f.sides.push_back(Side{true, std::move(b.true_side)});
      f.sides.push_back(Side{false, std::move(b.false_side)});
    } else {
      f.sides.push_back(Side{false, std::move(b.false_side)});
      f.sides.push_back(Side{true, std::move(b.true_side)});
    }
    frames_.push_back(std::move(f));
  }

  void confirm(std::size_t len, std::optional<Model> model) {
    confirmed_ = std::max(confirmed_, len);
    if (model) {
      model_ = std::move(model);
      model_len_ = len;
    }
  }

  std::optional<Model> model_for(std::size_t len) const {
    if (!model_ || model_len_ != len)
      return std::nullopt;
    try {
      for (const Constraint &c : pc_of(len))
        if (!c.holds(*model_))
          return std::nullopt;
    } catch (const std::out_of_range &) {
      return std::nullopt;
    }
    return model_;
  }

  SideInfo side_of(std::size_t len) const {
    const Frame &f = frames_[len - 1];
    return SideInfo{f.sides[f.cursor].side, f.equation};
  }

  std::vector<Constraint> pc_of(std::size_t len) const {
    if (len == 0)
      return {};
    const Frame &f = frames_[len - 1];
    return f.sides[f.cursor].state.pc.constraints();
  }

  // Entering the side under the cursor of the top frame.
  std::optional<SymState> enter_current() {
    Frame &f = frames_.back();
    Side &s = f.current();
    std::size_t len = frames_.size();
    if (cfg_.optimize &&
        apply_absurdity(ledger_, f.branch_id, s.side) == Absurdity::KnownFeasible) {
      ++rec_.stats.avoided;
      rec_.ledger_confirmed.push_back(s.state.pc.constraints());
      if (cfg_.absurdity_resets_depth || depth() >= static_cast<std::size_t>(cfg_.depth))
        confirm(len, std::nullopt);
      s.state.spec_depth = static_cast<int>(depth());
      return s.state;
    }
    if (depth() >= static_cast<std::size_t>(cfg_.depth)) {
      auto cs = s.state.pc.constraints();
      std::optional<SolverVerdict> v;
      try {
        v = query(cs, SideInfo{s.side, f.equation}, QueryPurpose::Side);
      } catch (const SolverException &) {
      }
      if (v && v->sat()) {
        confirm(len, v->model);
        s.state.spec_depth = 0;
        s.state.pc.status = Feasibility::Sat;
        return s.state;
      }
      locate_and_prune(static_cast<int>(depth()), std::nullopt, !v);
      return std::nullopt;
    }
    s.state.spec_depth = static_cast<int>(depth());
    return s.state;
  }

  // Segment positions are 1..L relative to `confirmed_`. With an error
  // constraint, position L is the error side of the division at the top of
  // the stack and positions 1..L-1 are the frames above the anchor.
  // Returns the first infeasible position.
  int locate(int L, const std::optional<ErrorSite *> &err, bool last_threw) {
    std::size_t base = confirmed_;
    auto prefix = [&](int i) {
      if (err && i == L)
        return with_extra((*err)->state.pc, *(*err)->extra);
      return pc_of(base + static_cast<std::size_t>(i));
    };
    auto side = [&](int i) {
      if (err && i == L)
        return SideInfo{true, true};
      return side_of(base + static_cast<std::size_t>(i));
    };
    SegmentFailure sf;
    sf.length = L;
    for (int i = 1; i <= L; ++i)
      sf.prefixes.push_back(prefix(i));
    std::uint64_t before = rec_.stats.total + rec_.stats.exceptions;

    std::map<int, bool> known;
    int failing = -1;
    if (last_threw)
      failing = L;
    else
      known[L] = false;
    int first_bad = -1;
    if (!last_threw) {
      int probing = -1;
      try {
        BisectResult br = backtrack_binary_search(L, [&](int i) {
          probing = i;
          bool ok = query(prefix(i), side(i), QueryPurpose::Probe).sat();
          known[i] = ok;
          return ok;
        });
        first_bad = br.first_bad;
      } catch (const SolverException &) {
        failing = probing;
      }
    }
    if (first_bad < 0) {
      // Careful front-to-back scan; the conjunction that raised is not
      // submitted again.
      for (int i = 1; i <= L && first_bad < 0; ++i) {
        if (auto it = known.find(i); it != known.end()) {
          if (!it->second)
            first_bad = i;
          continue;
        }
        if (i == failing)
          abort(prefix(i), "undecidable prefix");
        bool ok = false;
        try {
          ok = query(prefix(i), side(i), QueryPurpose::Scan).sat();
        } catch (const SolverException &e) {
          abort(prefix(i), e.what());
        }
        known[i] = ok;
        if (!ok)
          first_bad = i;
      }
    }
    // +1 for the check that detected the failure.
    sf.invocations =
        static_cast<int>(rec_.stats.total + rec_.stats.exceptions - before) + 1;
    sf.first_bad = first_bad;
    rec_.failures.push_back(std::move(sf));
    return first_bad;
  }

  // Handles a failed check of a segment of length L (ending at the top
  // frame). The infeasible frame stays on top with confirmed_ at its parent.
  void locate_and_prune(int L, std::optional<ErrorSite *> err, bool last_threw) {
    int bad = locate(L, err, last_threw);
    prune_at(confirmed_ + static_cast<std::size_t>(bad));
  }

  void prune_at(std::size_t len) {
    Frame &f = frames_[len - 1];
    ledger_.record(f.branch_id, f.current().side);
    leaf(LeafKind::Pruned, pc_of(len), f.instr);
    frames_.resize(len);
    confirmed_ = len - 1;
  }

  std::optional<SymState> backtrack() {
    while (!frames_.empty()) {
      Frame &f = frames_.back();
      if (f.cursor + 1 < f.sides.size()) {
        ++f.cursor;
        confirmed_ = std::min(confirmed_, frames_.size() - 1);
        if (auto s = enter_current())
          return s;
        continue;
      }
      frames_.pop_back();
      confirmed_ = std::min(confirmed_, frames_.size());
    }
    return std::nullopt;
  }

  void on_path_end(const SymState &s) {
    std::size_t len = frames_.size();
    if (depth() == 0) {
      leaf(LeafKind::Normal, s.pc.constraints());
      return;
    }
    auto cs = s.pc.constraints();
    std::optional<SolverVerdict> v;
    try {
      v = query(cs, side_of(len), QueryPurpose::PathEnd);
    } catch (const SolverException &) {
    }
    if (v && v->sat()) {
      confirm(len, v->model);
      leaf(LeafKind::Normal, std::move(cs));
      return;
    }
    locate_and_prune(static_cast<int>(depth()), std::nullopt, !v);
  }

  std::optional<SymState> on_error(ErrorSite site) {
    std::size_t len = frames_.size();
    if (!site.extra) {
      auto cs = site.state.pc.constraints();
      if (depth() == 0) {
        report(site, cs, model_for(len), true);
        leaf(LeafKind::Error, std::move(cs), site.instr, site.message);
        return std::nullopt;
      }
      if (!cfg_.recheck) {
        report(site, cs, std::nullopt, false);
        leaf(LeafKind::Error, std::move(cs), site.instr, site.message);
        return std::nullopt;
      }
      std::optional<SolverVerdict> v;
      try {
        v = query(cs, side_of(len), QueryPurpose::ErrorSite);
      } catch (const SolverException &) {
      }
      if (v && v->sat()) {
        confirm(len, v->model);
        report(site, cs, v->model, true);
        leaf(LeafKind::Error, std::move(cs), site.instr, site.message);
        return std::nullopt;
      }
      locate_and_prune(static_cast<int>(depth()), std::nullopt, !v);
      return std::nullopt;
    }

    // Division fork: the zero-divisor side first, then the continuation.
    auto err = with_extra(site.state.pc, *site.extra);
    if (depth() > 0 && !cfg_.recheck) {
      report(site, err, std::nullopt, false);
      leaf(LeafKind::Error, err, site.instr, site.message);
    } else {
      std::optional<SolverVerdict> v;
      try {
        v = query(err, SideInfo{true, true}, QueryPurpose::ErrorSite);
      } catch (const SolverException &) {
      }
      if (v && v->sat()) {
        confirm(len, std::nullopt);
        report(site, err, v->model, true);
        leaf(LeafKind::Error, err, site.instr, site.message);
      } else {
        int L = static_cast<int>(depth()) + 1;
        ErrorSite *ptr = &site;
        int bad = locate(L, ptr, !v);
        if (bad < L) {
          prune_at(confirmed_ + static_cast<std::size_t>(bad));
          return std::nullopt;
        }
        confirmed_ = len;
        ledger_.record(site.branch_id, true);
        leaf(LeafKind::Pruned, err, site.instr, site.message);
      }
    }
    Frame f{site.branch_id, true, site.instr, {}, 0};
    f.sides.push_back(Side{false, std::move(*site.continuation)});
    frames_.push_back(std::move(f));
    return enter_current();
  }

  std::vector<Frame> frames_;
  std::size_t confirmed_ = 0;
  AbsurdityLedger ledger_;
  std::optional<Model> model_;
  std::size_t model_len_ = 0;
};

} // namespace

ExplorationRecord run_pure_dfs(const Code &code, const SearchConfig &cfg,
                               Solver &solver) {
  return PureEngine(code, cfg, solver).run();
}

ExplorationRecord run_speculative_dfs(const Code &code, const SearchConfig &cfg,
                                      Solver &solver) {
  return SpeculativeEngine(code, cfg, solver).run();
}

ExplorationRecord run_search(const Code &code, const SearchConfig &cfg,
                             Solver &solver) {
  if (cfg.strategy == Strategy::Pure)
    return run_pure_dfs(code, cfg, solver);
  return run_speculative_dfs(code, cfg, solver);
}

std::vector<LeafKey> leaf_multiset(const ExplorationRecord &r) {
  std::vector<LeafKey> out;
  for (const Leaf &l : r.leaves)
    if (l.kind != LeafKind::Pruned)
      out.emplace_back(l.kind, l.pc);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> compare_leaves(const ExplorationRecord &expected,
                                          const ExplorationRecord &actual) {
  auto a = leaf_multiset(expected), b = leaf_multiset(actual);
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i])
    ++i;
  if (i == a.size() && i == b.size())
    return std::nullopt;
  auto describe = [](const LeafKey &k) {
    return std::string(to_string(k.first)) + " leaf [" + to_string(k.second) + "]";
  };
  if (i < b.size() && (i == a.size() || b[i] < a[i]))
    return "unexpected " + describe(b[i]);
  return "missing " + describe(a[i]);
}

} // namespace sse
