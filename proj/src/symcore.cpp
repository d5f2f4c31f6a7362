#include "sse/symcore.hpp"

#include <sstream>

namespace sse {

std::int64_t div_trunc(std::int64_t n, std::int64_t d) {
  if (d == 0)
    throw std::domain_error("division by zero");
  if (d == -1)
    return checked_sub(0, n);
  return n / d;
}

static bool same_ptr(const std::shared_ptr<const SymExpr> &a,
                     const std::shared_ptr<const SymExpr> &b) {
  if (!a || !b)
    return !a && !b;
  return *a == *b;
}

bool operator==(const SymExpr &a, const SymExpr &b) {
  if (!(a.lin == b.lin) || a.divs.size() != b.divs.size())
    return false;
  for (std::size_t i = 0; i < a.divs.size(); ++i) {
    const DivTerm &x = a.divs[i], &y = b.divs[i];
    if (x.coeff != y.coeff || !same_ptr(x.num, y.num) || !same_ptr(x.den, y.den))
      return false;
  }
  return true;
}

std::string to_string(const SymExpr &e) {
  std::ostringstream os;
  os << to_string(e.lin);
  for (const DivTerm &d : e.divs)
    os << " + " << d.coeff << "*((" << to_string(*d.num) << ") / ("
       << to_string(*d.den) << "))";
  return os.str();
}

static SymExpr scaled(const SymExpr &e, std::int64_t k) {
  SymExpr r;
  r.lin = scale(e.lin, k);
  if (k == 0)
    return r;
  for (DivTerm d : e.divs) {
    d.coeff = checked_mul(d.coeff, k);
    r.divs.push_back(std::move(d));
  }
  return r;
}

static SymExpr sum(const SymExpr &a, const SymExpr &b, std::int64_t kb) {
  SymExpr r = a;
  r.lin = a.lin + scale(b.lin, kb);
  for (DivTerm d : b.divs) {
    d.coeff = checked_mul(d.coeff, kb);
    r.divs.push_back(std::move(d));
  }
  return r;
}

static bool is_const(const SymExpr &e) { return e.is_linear() && e.lin.is_constant(); }

SymExpr eval(const Env &env, const IntExpr &e) {
  switch (e.kind) {
  case IntExpr::Kind::Lit: {
    SymExpr r;
    r.lin = LinearForm::of_constant(e.value);
    return r;
  }
  case IntExpr::Kind::Var: {
    auto it = env.find(e.name);
    if (it == env.end())
      throw std::out_of_range("unbound variable '" + e.name + "'");
    SymExpr r;
    r.lin = it->second;
    return r;
  }
  case IntExpr::Kind::Neg:
    return scaled(eval(env, *e.lhs), -1);
  case IntExpr::Kind::Add:
    return sum(eval(env, *e.lhs), eval(env, *e.rhs), 1);
  case IntExpr::Kind::Sub:
    return sum(eval(env, *e.lhs), eval(env, *e.rhs), -1);
  case IntExpr::Kind::Mul: {
    SymExpr l = eval(env, *e.lhs), r = eval(env, *e.rhs);
    if (is_const(l))
      return scaled(r, l.lin.constant);
    if (is_const(r))
      return scaled(l, r.lin.constant);
    throw std::domain_error("non-linear multiplication");
  }
  case IntExpr::Kind::Div: {
    SymExpr n = eval(env, *e.lhs), d = eval(env, *e.rhs);
    if (is_const(d) && d.lin.constant == 0)
      throw std::domain_error("division by constant zero");
    if (is_const(n) && is_const(d)) {
      SymExpr r;
      r.lin = LinearForm::of_constant(div_trunc(n.lin.constant, d.lin.constant));
      return r;
    }
    SymExpr r;
    r.divs.push_back(DivTerm{1, std::make_shared<SymExpr>(std::move(n)),
                             std::make_shared<SymExpr>(std::move(d))});
    return r;
  }
  }
  throw std::logic_error("unknown expression kind");
}

std::vector<Constraint> PathCondition::constraints() const {
  std::vector<Constraint> out;
  out.reserve(entries.size());
  for (const auto &e : entries)
    out.push_back(e.constraint);
  return out;
}

PathCondition append_constraint(const PathCondition &pc, const Constraint &c,
                                std::uint64_t branch_id) {
  if (!pc.entries.empty() && pc.entries.back().branch_id >= branch_id)
    throw std::invalid_argument("branch ids in a path condition must increase");
  PathCondition r;
  r.entries = pc.entries;
  r.entries.push_back(PCEntry{c, branch_id});
  r.status = Feasibility::Unknown;
  return r;
}

SymState initial_state(const Code &code) {
  SymState s;
  for (const auto &in : code.inputs)
    s.env[in] = LinearForm::of_var(in);
  s.loop_counters.assign(code.loop_count, 0);
  s.pc.status = Feasibility::Sat;
  return s;
}

namespace {

// A division met during evaluation that has not been decided yet.
struct Pending {
  enum class Kind { Opaque, Fork, Zero } kind;
  int ordinal;
  LinearForm den;
};

class Evaluator {
public:
  Evaluator(const SymState &s) : s_(s) {}

  std::optional<LinearForm> run(const IntExpr &e) {
    switch (e.kind) {
    case IntExpr::Kind::Lit:
      return LinearForm::of_constant(e.value);
    case IntExpr::Kind::Var: {
      auto it = s_.env.find(e.name);
      if (it == s_.env.end())
        throw std::out_of_range("unbound variable '" + e.name + "'");
      return it->second;
    }
    case IntExpr::Kind::Neg: {
      auto v = run(*e.lhs);
      if (!v)
        return std::nullopt;
      return -*v;
    }
    case IntExpr::Kind::Add:
    case IntExpr::Kind::Sub:
    case IntExpr::Kind::Mul:
    case IntExpr::Kind::Div: {
      auto l = run(*e.lhs);
      if (!l)
        return std::nullopt;
      auto r = run(*e.rhs);
      if (!r)
        return std::nullopt;
      if (e.kind == IntExpr::Kind::Add)
        return *l + *r;
      if (e.kind == IntExpr::Kind::Sub)
        return *l - *r;
      if (e.kind == IntExpr::Kind::Mul) {
        if (l->is_constant())
          return scale(*r, l->constant);
        if (r->is_constant())
          return scale(*l, r->constant);
        throw std::domain_error("non-linear multiplication");
      }
      int ord = next_ordinal_++;
      if (auto it = s_.resolved.find(ord); it != s_.resolved.end())
        return it->second;
      if (r->is_constant()) {
        if (r->constant == 0) {
          pending = Pending{Pending::Kind::Zero, ord, *r};
          return std::nullopt;
        }
        if (l->is_constant())
          return LinearForm::of_constant(div_trunc(l->constant, r->constant));
        pending = Pending{Pending::Kind::Opaque, ord, *r};
        return std::nullopt;
      }
      pending = Pending{Pending::Kind::Fork, ord, *r};
      return std::nullopt;
    }
    }
    throw std::logic_error("unknown expression kind");
  }

  std::optional<Pending> pending;

private:
  const SymState &s_;
  int next_ordinal_ = 0;
};

std::string quotient_name(int n) { return "$q" + std::to_string(n); }

StepResult resolve(const SymState &s, const Instr &in, const Pending &p,
                   StepContext &ctx) {
  if (p.kind == Pending::Kind::Zero) {
    ErrorSite site;
    site.message = "divide-by-zero";
    site.instr = s.addr;
    site.line = in.line;
    site.state = s;
    return site;
  }
  SymState next = s;
  next.resolved[p.ordinal] = LinearForm::of_var(quotient_name(next.quotients));
  ++next.quotients;
  if (p.kind == Pending::Kind::Opaque)
    return NextState{std::move(next)};
  std::uint64_t id = ctx.next_branch_id++;
  Constraint nonzero = make_constraint(p.den, Rel::Ne, LinearForm::of_constant(0));
  next.pc = append_constraint(s.pc, nonzero, id);
  ErrorSite site;
  site.message = "divide-by-zero";
  site.instr = s.addr;
  site.line = in.line;
  site.state = s;
  site.extra = make_constraint(p.den, Rel::Eq, LinearForm::of_constant(0));
  site.continuation = std::move(next);
  site.continuation_constraint = nonzero;
  site.branch_id = id;
  return site;
}

SymState advanced(const SymState &s, int addr) {
  SymState n = s;
  n.addr = addr;
  n.resolved.clear();
  ++n.executed;
  return n;
}

} // namespace

StepResult step(const SymState &s, const Code &code, StepContext &ctx) {
  if (s.addr < 0 || s.addr >= static_cast<int>(code.instrs.size()))
    throw std::out_of_range("program counter out of range");
  const Instr &in = code.instrs[s.addr];
  switch (in.op) {
  case Instr::Op::Assign:
  case Instr::Op::Print: {
    Evaluator ev(s);
    auto v = ev.run(*in.expr);
    if (!v)
      return resolve(s, in, *ev.pending, ctx);
    SymState n = advanced(s, s.addr + 1);
    if (in.op == Instr::Op::Assign)
      n.env[in.target] = *v;
    return NextState{std::move(n)};
  }
  case Instr::Op::LoopEnter: {
    SymState n = s;
    n.loop_counters[in.loop] = 0;
    n.addr = s.addr + 1;
    return NextState{std::move(n)};
  }
  case Instr::Op::Jump: {
    SymState n = s;
    n.addr = in.jump;
    return NextState{std::move(n)};
  }
  case Instr::Op::LoopHead:
    if (s.loop_counters[in.loop] >= ctx.loop_bound) {
      SymState n = s;
      ++n.executed;
      return PathEnd{std::move(n), true};
    }
    [[fallthrough]];
  case Instr::Op::Branch: {
    Evaluator ev(s);
    auto l = ev.run(*in.cond.lhs);
    if (!l)
      return resolve(s, in, *ev.pending, ctx);
    auto r = ev.run(*in.cond.rhs);
    if (!r)
      return resolve(s, in, *ev.pending, ctx);
    Constraint t = make_constraint(*l, in.cond.rel, *r);
    bool loop = in.op == Instr::Op::LoopHead;
    if (t.is_constant()) {
      SymState n = advanced(s, t.is_true() ? in.on_true : in.on_false);
      if (loop && t.is_true())
        ++n.loop_counters[in.loop];
      return NextState{std::move(n)};
    }
    BranchOutcome out;
    out.branch_id = ctx.next_branch_id++;
    out.instr = s.addr;
    out.equation = is_equation(in.cond.rel);
    out.true_constraint = t;
    out.false_constraint = complement(t);
    out.true_side = advanced(s, in.on_true);
    out.true_side.pc = append_constraint(s.pc, t, out.branch_id);
    if (loop)
      ++out.true_side.loop_counters[in.loop];
    out.false_side = advanced(s, in.on_false);
    out.false_side.pc = append_constraint(s.pc, out.false_constraint, out.branch_id);
    return out;
  }
  case Instr::Op::Fail: {
    ErrorSite site;
    site.message = in.message;
    site.instr = s.addr;
    site.line = in.line;
    site.state = s;
    ++site.state.executed;
    return site;
  }
  case Instr::Op::End:
    return PathEnd{s, false};
  }
  throw std::logic_error("unknown instruction");
}

} // namespace sse
