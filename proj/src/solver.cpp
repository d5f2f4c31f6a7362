#include "sse/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <numeric>

namespace sse {

namespace {

using Vec = std::vector<std::int64_t>;

// sum(a * x) <= b
struct Row {
  Vec a;
  std::int64_t b;
};

// sum(a * x) rel b with rel in {Le, Ge, Eq, Ne}
struct Lin {
  Vec a;
  Rel rel;
  std::int64_t b;
};

struct BudgetExceeded {};

struct Context {
  const SolverOptions &opts;
  std::size_t nvars;
  std::uint64_t nodes = 0;

  void tick() {
    if (++nodes > opts.max_nodes)
      throw BudgetExceeded{};
  }
};

bool all_zero(const Vec &a) {
  return std::all_of(a.begin(), a.end(), [](std::int64_t v) { return v == 0; });
}

std::int64_t gcd_of(const Vec &a) {
  std::int64_t g = 0;
  for (std::int64_t v : a)
    g = std::gcd(g, v);
  return g;
}

// Divides by the coefficient gcd with integer tightening. Returns false when
// the row is a constant contradiction.
bool tighten(Row &r) {
  std::int64_t g = gcd_of(r.a);
  if (g == 0)
    return r.b >= 0;
  if (g > 1) {
    for (auto &v : r.a)
      v /= g;
    r.b = floor_div(r.b, g);
  }
  return true;
}

// Returns false for a constant contradiction; true constants are marked by
// clearing the relation to Le with b >= 0 and all-zero coefficients.
bool tighten(Lin &l) {
  std::int64_t g = gcd_of(l.a);
  if (g == 0) {
    switch (l.rel) {
    case Rel::Le: return 0 <= l.b;
    case Rel::Ge: return 0 >= l.b;
    case Rel::Eq: return l.b == 0;
    case Rel::Ne: return l.b != 0;
    default: return false;
    }
  }
  if (g == 1)
    return true;
  switch (l.rel) {
  case Rel::Le: l.b = floor_div(l.b, g); break;
  case Rel::Ge: l.b = ceil_div(l.b, g); break;
  case Rel::Eq:
    if (l.b % g != 0)
      return false;
    l.b /= g;
    break;
  case Rel::Ne:
    if (l.b % g != 0) {
      // Always true; drop it.
      std::fill(l.a.begin(), l.a.end(), 0);
      l.rel = Rel::Le;
      l.b = 0;
      return true;
    }
    l.b /= g;
    break;
  default: break;
  }
  for (auto &v : l.a)
    v /= g;
  return true;
}

std::int64_t dot(const Vec &a, const Vec &x) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0)
      s = checked_add(s, checked_mul(a[i], x[i]));
  return s;
}

// Integer feasibility of a conjunction of Le/Ge/Eq over a box.
class ConvexCore {
public:
  explicit ConvexCore(Context &ctx) : ctx_(ctx) {}

  std::optional<Vec> solve(std::vector<Lin> cons) {
    std::size_t n = ctx_.nvars;
    std::vector<std::pair<std::size_t, Lin>> substitutions;
    std::vector<bool> eliminated(n, false);
    std::vector<Row> rows;

    // Exact elimination through equalities with a unit coefficient.
    for (;;) {
      std::optional<std::size_t> pick;
      std::size_t var = 0;
      for (std::size_t i = 0; i < cons.size() && !pick; ++i) {
        if (!tighten(cons[i]))
          return std::nullopt;
        if (cons[i].rel != Rel::Eq)
          continue;
        for (std::size_t v = 0; v < n; ++v)
          if (cons[i].a[v] == 1 || cons[i].a[v] == -1) {
            pick = i;
            var = v;
            break;
          }
      }
      if (!pick)
        break;
      Lin eq = cons[*pick];
      cons.erase(cons.begin() + static_cast<std::ptrdiff_t>(*pick));
      std::int64_t av = eq.a[var];
      for (Lin &c : cons) {
        if (c.a[var] == 0)
          continue;
        std::int64_t f = checked_mul(c.a[var], av);
        for (std::size_t j = 0; j < n; ++j)
          c.a[j] = checked_sub(c.a[j], checked_mul(f, eq.a[j]));
        c.b = checked_sub(c.b, checked_mul(f, eq.b));
      }
      // Keep the eliminated variable inside its domain:
      // x_v = av * (b - rest), so lo <= av*b - av*rest <= hi.
      Lin rest = eq;
      rest.a[var] = 0;
      Vec neg(n);
      for (std::size_t j = 0; j < n; ++j)
        neg[j] = checked_mul(-av, rest.a[j]);
      std::int64_t base = checked_mul(av, eq.b);
      cons.push_back(Lin{neg, Rel::Le, checked_sub(ctx_.opts.domain_hi, base)});
      cons.push_back(Lin{neg, Rel::Ge, checked_sub(ctx_.opts.domain_lo, base)});
      eliminated[var] = true;
      substitutions.emplace_back(var, eq);
    }

    for (Lin &c : cons) {
      if (!tighten(c))
        return std::nullopt;
      if (all_zero(c.a))
        continue;
      if (c.rel == Rel::Le || c.rel == Rel::Eq)
        rows.push_back(Row{c.a, c.b});
      if (c.rel == Rel::Ge || c.rel == Rel::Eq) {
        Vec neg(n);
        for (std::size_t j = 0; j < n; ++j)
          neg[j] = checked_sub(0, c.a[j]);
        rows.push_back(Row{neg, checked_sub(0, c.b)});
      }
    }
    std::vector<std::size_t> active;
    for (std::size_t v = 0; v < n; ++v) {
      if (eliminated[v])
        continue;
      active.push_back(v);
      Vec up(n, 0), down(n, 0);
      up[v] = 1;
      down[v] = -1;
      rows.push_back(Row{up, ctx_.opts.domain_hi});
      rows.push_back(Row{down, checked_sub(0, ctx_.opts.domain_lo)});
    }

    auto x = project_and_assign(std::move(rows), active);
    if (!x)
      return std::nullopt;
    for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it) {
      auto &[var, eq] = *it;
      Lin rest = eq;
      rest.a[var] = 0;
      (*x)[var] = checked_mul(eq.a[var], checked_sub(eq.b, dot(rest.a, *x)));
    }
    return x;
  }

private:
  static std::vector<Row> dedup(std::vector<Row> rows) {
    std::map<Vec, std::int64_t> best;
    for (Row &r : rows) {
      auto [it, inserted] = best.emplace(r.a, r.b);
      if (!inserted)
        it->second = std::min(it->second, r.b);
    }
    std::vector<Row> out;
    out.reserve(best.size());
    for (auto &[a, b] : best)
      out.push_back(Row{a, b});
    return out;
  }

  std::optional<Vec> project_and_assign(std::vector<Row> rows,
                                        std::vector<std::size_t> vars) {
    std::size_t n = ctx_.nvars;
    for (Row &r : rows)
      if (!tighten(r))
        return std::nullopt;
    rows = dedup(std::move(rows));
    stages_.clear();
    order_.clear();
    while (!vars.empty()) {
      // Cheapest variable to eliminate next.
      std::size_t best_i = 0;
      long best_cost = -1;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        long pos = 0, neg = 0;
        for (const Row &r : rows) {
          if (r.a[vars[i]] > 0)
            ++pos;
          else if (r.a[vars[i]] < 0)
            ++neg;
        }
        long cost = pos * neg - pos - neg;
        if (best_cost < 0 || cost < best_cost) {
          best_cost = cost < 0 ? 0 : cost;
          best_i = i;
          if (cost <= 0)
            break;
        }
      }
      std::size_t v = vars[best_i];
      vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(best_i));
      std::vector<Row> pos, neg, next;
      for (Row &r : rows) {
        if (r.a[v] > 0)
          pos.push_back(r);
        else if (r.a[v] < 0)
          neg.push_back(r);
        else
          next.push_back(r);
      }
      for (const Row &p : pos) {
        for (const Row &q : neg) {
          std::int64_t fp = -q.a[v], fq = p.a[v];
          Row c{Vec(n), 0};
          for (std::size_t j = 0; j < n; ++j)
            c.a[j] = checked_add(checked_mul(fp, p.a[j]), checked_mul(fq, q.a[j]));
          c.b = checked_add(checked_mul(fp, p.b), checked_mul(fq, q.b));
          if (!tighten(c))
            return std::nullopt;
          if (!all_zero(c.a))
            next.push_back(std::move(c));
        }
        if (next.size() > ctx_.opts.max_rows)
          throw BudgetExceeded{};
      }
      stages_.push_back(std::move(rows));
      order_.push_back(v);
      rows = dedup(std::move(next));
    }
    Vec x(n, 0);
    if (!assign(static_cast<int>(order_.size()) - 1, x))
      return std::nullopt;
    return x;
  }

  bool assign(int level, Vec &x) {
    if (level < 0)
      return true;
    std::size_t v = order_[level];
    std::int64_t lo = ctx_.opts.domain_lo, hi = ctx_.opts.domain_hi;
    for (const Row &r : stages_[level]) {
      std::int64_t a = r.a[v];
      if (a == 0)
        continue;
      std::int64_t rest = 0;
      for (std::size_t j = 0; j < r.a.size(); ++j)
        if (j != v && r.a[j] != 0)
          rest = checked_add(rest, checked_mul(r.a[j], x[j]));
      std::int64_t rhs = checked_sub(r.b, rest);
      if (a > 0)
        hi = std::min(hi, floor_div(rhs, a));
      else
        lo = std::max(lo, ceil_div(rhs, a));
    }
    if (lo > hi)
      return false;
    // Values closest to zero first.
    std::int64_t start = std::clamp<std::int64_t>(0, lo, hi);
    for (std::int64_t d = 0;; ++d) {
      bool any = false;
      for (std::int64_t cand : {start + d, start - d}) {
        if (d == 0 && cand != start + d)
          continue;
        if (cand < lo || cand > hi)
          continue;
        any = true;
        ctx_.tick();
        x[v] = cand;
        if (assign(level - 1, x))
          return true;
      }
      if (!any)
        break;
    }
    return false;
  }

  Context &ctx_;
  std::vector<std::vector<Row>> stages_;
  std::vector<std::size_t> order_;
};

std::optional<Vec> solve_lazy(Context &ctx, std::vector<Lin> cons) {
  std::vector<Lin> convex, ne;
  for (const Lin &c : cons)
    (c.rel == Rel::Ne ? ne : convex).push_back(c);
  ctx.tick();
  ConvexCore core(ctx);
  auto x = core.solve(convex);
  if (!x)
    return std::nullopt;
  for (std::size_t i = 0; i < ne.size(); ++i) {
    if (dot(ne[i].a, *x) != ne[i].b)
      continue;
    std::vector<Lin> below = cons, above;
    auto it = std::find_if(below.begin(), below.end(), [&](const Lin &c) {
      return c.rel == Rel::Ne && c.a == ne[i].a && c.b == ne[i].b;
    });
    *it = Lin{ne[i].a, Rel::Le, checked_sub(ne[i].b, 1)};
    above = below;
    above[static_cast<std::size_t>(it - below.begin())] =
        Lin{ne[i].a, Rel::Ge, checked_add(ne[i].b, 1)};
    if (auto r = solve_lazy(ctx, std::move(below)))
      return r;
    return solve_lazy(ctx, std::move(above));
  }
  return x;
}

std::optional<Vec> enumerate(const SolverOptions &opts, std::size_t n,
                             const std::vector<Lin> &cons) {
  Vec x(n, opts.domain_lo);
  auto ok = [&] {
    for (const Lin &c : cons) {
      std::int64_t s = dot(c.a, x);
      bool h = c.rel == Rel::Le   ? s <= c.b
               : c.rel == Rel::Ge ? s >= c.b
               : c.rel == Rel::Eq ? s == c.b
                                  : s != c.b;
      if (!h)
        return false;
    }
    return true;
  };
  for (;;) {
    if (ok())
      return x;
    std::size_t i = 0;
    while (i < n && x[i] == opts.domain_hi)
      x[i++] = opts.domain_lo;
    if (i == n)
      return std::nullopt;
    ++x[i];
  }
}

} // namespace

SolverVerdict BuiltinSolver::solve(const std::vector<Constraint> &input) {
  auto t0 = std::chrono::steady_clock::now();
  SolverVerdict verdict;
  auto finish = [&] {
    verdict.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return verdict;
  };
  if (opts_.domain_lo > opts_.domain_hi)
    throw SolverException("empty variable domain");

  std::vector<std::string> names;
  std::vector<Constraint> cs;
  for (const Constraint &raw : input) {
    Constraint c = normalize(raw.coeffs, raw.rel, raw.rhs);
    if (c.is_false())
      return finish();
    if (c.is_true())
      continue;
    for (const auto &[name, coef] : c.coeffs)
      names.push_back(name);
    cs.push_back(std::move(c));
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  if (names.size() > opts_.max_vars)
    throw SolverException("capacity exceeded: " + std::to_string(names.size()) +
                          " variables (limit " + std::to_string(opts_.max_vars) + ")");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i)
    index[names[i]] = i;
  std::vector<Lin> lins;
  for (const Constraint &c : cs) {
    Lin l{Vec(names.size(), 0), c.rel, c.rhs};
    for (const auto &[name, coef] : c.coeffs)
      l.a[index[name]] = coef;
    lins.push_back(std::move(l));
  }

  std::optional<Vec> x;
  try {
    Context ctx{opts_, names.size()};
    x = solve_lazy(ctx, lins);
  } catch (const ArithmeticOverflow &) {
    throw SolverException("capacity exceeded: coefficient overflow");
  } catch (const BudgetExceeded &) {
    long double space = 1;
    for (std::size_t i = 0; i < names.size(); ++i)
      space *= static_cast<long double>(opts_.domain_hi - opts_.domain_lo + 1);
    if (space > static_cast<long double>(opts_.enum_limit))
      throw SolverException("capacity exceeded: search limit reached");
    x = enumerate(opts_, names.size(), lins);
  }
  if (!x)
    return finish();

  verdict.status = SolverStatus::Sat;
  for (std::size_t i = 0; i < names.size(); ++i)
    verdict.model[names[i]] = (*x)[i];
  for (const Constraint &c : input)
    for (const auto &[name, coef] : c.coeffs)
      verdict.model.emplace(name, 0);
  for (const Constraint &c : input)
    if (!c.holds(verdict.model))
      throw std::logic_error("solver produced a model violating " + to_string(c));
  return finish();
}

std::unique_ptr<Solver> make_solver(const std::string &spec,
                                    const SolverOptions &opts) {
  if (spec == "builtin")
    return std::make_unique<BuiltinSolver>(opts);
  const std::string prefix = "external:";
  if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size())
    return std::make_unique<ExternalSolver>(spec.substr(prefix.size()), opts);
  throw std::invalid_argument("unknown solver '" + spec +
                              "' (expected builtin or external:<command>)");
}

bool operator==(const SolverStats &a, const SolverStats &b) {
  if (a.sat != b.sat || a.unsat != b.unsat || a.total != b.total ||
      a.exceptions != b.exceptions || a.avoided != b.avoided)
    return false;
  for (int f = 0; f < 2; ++f)
    for (int t = 0; t < 2; ++t)
      for (int e = 0; e < 2; ++e)
        if (a.sides[f][t][e] != b.sides[f][t][e])
          return false;
  return true;
}

SolverVerdict counted_solve(SolverStats &stats, Solver &solver,
                            const std::vector<Constraint> &constraints,
                            SideInfo side) {
  auto t0 = std::chrono::steady_clock::now();
  SolverVerdict v;
  try {
    v = solver.solve(constraints);
  } catch (...) {
    ++stats.exceptions;
    stats.seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    throw;
  }
  stats.seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ++stats.total;
  if (v.sat())
    ++stats.sat;
  else
    ++stats.unsat;
  ++stats.sides[v.sat()][side.true_side][side.equation];
  return v;
}

} // namespace sse
