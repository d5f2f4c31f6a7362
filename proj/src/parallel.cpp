#include "sse/parallel.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <random>

#include <omp.h>

namespace sse {

std::vector<TreeCase> make_tree_cases(std::size_t count, int max_height,
                                      const std::vector<double> &ps,
                                      std::uint64_t seed) {
  if (max_height < 1 || ps.empty())
    throw std::invalid_argument("need a positive height bound and probabilities");
  std::mt19937_64 rng(seed);
  std::vector<TreeCase> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(TreeCase{static_cast<int>(i % static_cast<std::size_t>(max_height)) + 1,
                           ps[(i / static_cast<std::size_t>(max_height)) % ps.size()],
                           rng()});
  return out;
}

bool operator==(const RatioSummary &a, const RatioSummary &b) {
  return a.comparisons == b.comparisons && a.violations == b.violations &&
         a.min_ratio == b.min_ratio && a.worst.seed == b.worst.seed &&
         a.worst.height == b.worst.height && a.worst_depth == b.worst_depth &&
         a.worst_order == b.worst_order;
}

static RatioSummary ratio_case(const TreeCase &c, int max_depth) {
  RatioSummary s;
  LabeledTree t = gen_random_tree(c.height, c.p, c.seed);
  bool first = true;
  for (Order order : {Order::FalseFirst, Order::TrueFirst}) {
    std::uint64_t pure = simulate_pure(t, order, false).total;
    for (int k = 1; k <= max_depth; ++k) {
      std::uint64_t sse = simulate_sse(t, SimOptions{k, order, false, true}).total;
      ++s.comparisons;
      if (sse * 2 <= pure)
        ++s.violations;
      double ratio = pure == 0 ? 1.0 : static_cast<double>(sse) / static_cast<double>(pure);
      if (first || ratio < s.min_ratio) {
        s.min_ratio = ratio;
        s.worst = c;
        s.worst_depth = k;
        s.worst_order = order;
        first = false;
      }
    }
  }
  return s;
}

static RatioSummary merge(const std::vector<RatioSummary> &parts) {
  RatioSummary s;
  bool first = true;
  for (const RatioSummary &p : parts) {
    s.comparisons += p.comparisons;
    s.violations += p.violations;
    if (p.comparisons && (first || p.min_ratio < s.min_ratio)) {
      s.min_ratio = p.min_ratio;
      s.worst = p.worst;
      s.worst_depth = p.worst_depth;
      s.worst_order = p.worst_order;
      first = false;
    }
  }
  return s;
}

RatioSummary ratio_batch_serial(const std::vector<TreeCase> &cases, int max_depth) {
  std::vector<RatioSummary> parts;
  parts.reserve(cases.size());
  for (const TreeCase &c : cases)
    parts.push_back(ratio_case(c, max_depth));
  return merge(parts);
}

RatioSummary ratio_batch_parallel(const std::vector<TreeCase> &cases, int max_depth) {
  std::vector<RatioSummary> parts(cases.size());
  const long n = static_cast<long>(cases.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i)
    parts[static_cast<std::size_t>(i)] = ratio_case(cases[static_cast<std::size_t>(i)], max_depth);
  return merge(parts);
}

static GridCell grid_cell(int n, int k) {
  GridCell c;
  c.n = n;
  c.k = k;
  c.simulated = simulate_sse(full_tree(n), SimOptions{k, Order::FalseFirst, false, true}).total;
  c.formula = eq1_formula(n, k);
  c.corrected = full_tree_count(n, k);
  return c;
}

std::vector<GridCell> eq1_grid_serial(int max_n, int max_k) {
  std::vector<GridCell> out;
  for (int n = 1; n <= max_n; ++n)
    for (int k = 1; k <= max_k; ++k)
      out.push_back(grid_cell(n, k));
  return out;
}

std::vector<GridCell> eq1_grid_parallel(int max_n, int max_k) {
  std::vector<GridCell> out(static_cast<std::size_t>(max_n) * static_cast<std::size_t>(max_k));
  const long total = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < total; ++i) {
    int n = static_cast<int>(i / max_k) + 1;
    int k = static_cast<int>(i % max_k) + 1;
    out[static_cast<std::size_t>(i)] = grid_cell(n, k);
  }
  return out;
}

namespace {

struct RowJob {
  int depth;
  Order order;
  bool optimize;
};

std::vector<RowJob> jobs_for(const SweepSpec &spec) {
  std::vector<RowJob> jobs;
  for (int k : spec.depths)
    for (Order o : spec.orders)
      for (bool opt : spec.optimize)
        jobs.push_back(RowJob{k, o, opt});
  return jobs;
}

SearchConfig config_for(const SweepSpec &spec, Strategy s, int k, Order o, bool opt) {
  SearchConfig c;
  c.strategy = s;
  c.depth = k;
  c.order = o;
  c.optimize = opt;
  c.recheck = spec.recheck;
  c.loop_bound = spec.loop_bound;
  return c;
}

double percent_of(std::uint64_t total, std::uint64_t pure) {
  return pure == 0 ? 100.0 : static_cast<double>(total) / static_cast<double>(pure) * 100.0;
}

SweepRow make_row(const RowJob &j, const ExplorationRecord &rec, std::uint64_t pure,
                  std::uint64_t plain) {
  SweepRow r;
  r.depth = j.depth;
  r.order = j.order;
  r.optimize = j.optimize;
  r.total = rec.stats.total;
  r.sat = rec.stats.sat;
  r.unsat = rec.stats.unsat;
  r.avoided = rec.stats.avoided;
  r.bugs = rec.bugs.size();
  r.pure_total = pure;
  r.percent = percent_of(r.total, pure);
  r.plain_pure_total = plain;
  r.percent_plain = percent_of(r.total, plain);
  return r;
}

std::pair<Order, bool> key(const RowJob &j) { return {j.order, j.optimize}; }

} // namespace

std::vector<SweepRow> sweep_serial(const Code &code, const SweepSpec &spec,
                                   const SolverFactory &make) {
  std::map<std::pair<Order, bool>, std::uint64_t> pure;
  auto jobs = jobs_for(spec);
  std::vector<RowJob> baselines = jobs;
  if (!jobs.empty())
    baselines.push_back(RowJob{1, jobs.front().order, false});
  for (const RowJob &j : baselines) {
    if (pure.count(key(j)))
      continue;
    auto solver = make();
    pure[key(j)] = run_pure_dfs(code, config_for(spec, Strategy::Pure, 1, j.order, j.optimize),
                                *solver)
                       .stats.total;
  }
  std::vector<SweepRow> rows;
  for (const RowJob &j : jobs) {
    auto solver = make();
    auto rec = run_speculative_dfs(
        code, config_for(spec, Strategy::Speculative, j.depth, j.order, j.optimize), *solver);
    rows.push_back(make_row(j, rec, pure[key(j)], pure[{jobs.front().order, false}]));
  }
  return rows;
}

std::vector<SweepRow> sweep_parallel(const Code &code, const SweepSpec &spec,
                                     const SolverFactory &make) {
  auto jobs = jobs_for(spec);
  std::vector<std::pair<Order, bool>> keys;
  std::vector<RowJob> baselines = jobs;
  if (!jobs.empty())
    baselines.push_back(RowJob{1, jobs.front().order, false});
  for (const RowJob &j : baselines)
    if (std::find(keys.begin(), keys.end(), key(j)) == keys.end())
      keys.push_back(key(j));
  const long nk = static_cast<long>(keys.size());
  const long nj = static_cast<long>(jobs.size());
  std::vector<std::uint64_t> pure_totals(keys.size());
  std::vector<SweepRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(keys.size() + jobs.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < nk; ++i) {
    try {
      auto solver = make();
      auto [order, opt] = keys[static_cast<std::size_t>(i)];
      pure_totals[static_cast<std::size_t>(i)] =
          run_pure_dfs(code, config_for(spec, Strategy::Pure, 1, order, opt), *solver)
              .stats.total;
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (errors[i])
      std::rethrow_exception(errors[i]);

#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < nj; ++i) {
    const RowJob &j = jobs[static_cast<std::size_t>(i)];
    try {
      auto solver = make();
      auto rec = run_speculative_dfs(
          code, config_for(spec, Strategy::Speculative, j.depth, j.order, j.optimize),
          *solver);
      std::size_t ki = static_cast<std::size_t>(
          std::find(keys.begin(), keys.end(), key(j)) - keys.begin());
      std::size_t pi = static_cast<std::size_t>(
          std::find(keys.begin(), keys.end(), std::make_pair(jobs.front().order, false)) -
          keys.begin());
      rows[static_cast<std::size_t>(i)] = make_row(j, rec, pure_totals[ki], pure_totals[pi]);
    } catch (...) {
      errors[keys.size() + static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return rows;
}

std::vector<Constraint> random_conjunction(std::uint64_t seed, const ConjunctionSpec &spec) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  int nvars = uniform(1, spec.max_vars);
  int nconj = uniform(1, spec.max_conjuncts);
  static const Rel rels[] = {Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge, Rel::Eq, Rel::Ne};
  std::vector<Constraint> out;
  for (int i = 0; i < nconj; ++i) {
    std::map<std::string, std::int64_t> coeffs;
    for (int v = 0; v < nvars; ++v) {
      int c = uniform(-spec.max_coeff, spec.max_coeff);
      if (c != 0)
        coeffs["X" + std::to_string(v)] = c;
    }
    Rel rel = rels[uniform(0, 5)];
    std::int64_t rhs = uniform(-spec.max_rhs, spec.max_rhs);
    out.push_back(normalize(std::move(coeffs), rel, rhs));
  }
  return out;
}

std::vector<SolverVerdict> solve_batch_serial(
    const std::vector<std::vector<Constraint>> &queries, const SolverOptions &opts) {
  BuiltinSolver solver(opts);
  std::vector<SolverVerdict> out;
  out.reserve(queries.size());
  for (const auto &q : queries)
    out.push_back(solver.solve(q));
  return out;
}

std::vector<SolverVerdict> solve_batch_parallel(
    const std::vector<std::vector<Constraint>> &queries, const SolverOptions &opts) {
  std::vector<SolverVerdict> out(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
  const long n = static_cast<long>(queries.size());
#pragma omp parallel
  {
    BuiltinSolver solver(opts);
#pragma omp for schedule(dynamic, 32)
    for (long i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = solver.solve(queries[static_cast<std::size_t>(i)]);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

} // namespace sse
