#include "sse/lang.hpp"
#include "sse/parallel.hpp"

#include <benchmark/benchmark.h>

using namespace sse;

namespace {

const std::vector<TreeCase> &tree_cases() {
  static const auto cases = make_tree_cases(1000, 10, {0.0, 0.1, 0.25, 0.42}, 7);
  return cases;
}

void BM_RatioSerial(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(ratio_batch_serial(tree_cases(), 10));
}
void BM_RatioParallel(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(ratio_batch_parallel(tree_cases(), 10));
}

void BM_GridSerial(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(eq1_grid_serial(14, 14));
}
void BM_GridParallel(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(eq1_grid_parallel(14, 14));
}

const Code &bst() {
  static const Code code = lower(load_program(std::string(SSE_CORPUS_DIR) + "/bst.sx"));
  return code;
}

SweepSpec sweep_spec() {
  SweepSpec s;
  for (int k = 1; k <= 8; ++k)
    s.depths.push_back(k);
  s.orders = {Order::FalseFirst, Order::TrueFirst};
  s.optimize = {false, true};
  return s;
}

void BM_SweepSerial(benchmark::State &st) {
  auto make = [] { return std::make_unique<BuiltinSolver>(); };
  for (auto _ : st)
    benchmark::DoNotOptimize(sweep_serial(bst(), sweep_spec(), make));
}
void BM_SweepParallel(benchmark::State &st) {
  auto make = [] { return std::make_unique<BuiltinSolver>(); };
  for (auto _ : st)
    benchmark::DoNotOptimize(sweep_parallel(bst(), sweep_spec(), make));
}

const std::vector<std::vector<Constraint>> &queries() {
  static const auto qs = [] {
    std::vector<std::vector<Constraint>> v;
    for (std::uint64_t i = 0; i < 2000; ++i)
      v.push_back(random_conjunction(i));
    return v;
  }();
  return qs;
}

void BM_SolveSerial(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_batch_serial(queries(), {}));
}
void BM_SolveParallel(benchmark::State &st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_batch_parallel(queries(), {}));
}

} // namespace

BENCHMARK(BM_RatioSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RatioParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
