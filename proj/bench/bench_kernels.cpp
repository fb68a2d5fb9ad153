// Parallel versus serial integration, plus the memoized t100 evaluation.
//
// Trees are expanded once before timing, so the integral benchmarks measure
// the fold itself rather than node construction.

#include <benchmark/benchmark.h>

#include "sdreal/digitsys.hpp"
#include "sdreal/exprdsl.hpp"
#include "sdreal/integrate.hpp"

namespace {

using sdreal::CTree;
using sdreal::Rational;

CTree warm_tree(const char* src, std::size_t k) {
  CTree t = sdreal::to_tree(sdreal::parse(src));
  sdreal::integral_serial(t, k);
  return t;
}

template <auto Kernel>
void integrate_logistic(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  CTree t = warm_tree("logistic(3/2)", k);
  std::uint64_t visited = 0;
  for (auto _ : state) {
    auto r = Kernel(t, k, sdreal::kDefaultIntegralBudget, sdreal::kUnlimitedExpansions);
    visited = r.nodes_visited;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["nodes"] = static_cast<double>(visited);
  state.counters["nodes/s"] = benchmark::Counter(static_cast<double>(visited), benchmark::Counter::kIsIterationInvariantRate);
}

template <auto Kernel>
void integrate_composite(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  CTree t = warm_tree("logistic(2) o logistic(7/4)", k);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(t, k, sdreal::kDefaultIntegralBudget, sdreal::kUnlimitedExpansions).value);
}

void BM_IntegralParallel(benchmark::State& s) { integrate_logistic<sdreal::integral>(s); }
void BM_IntegralSerial(benchmark::State& s) { integrate_logistic<sdreal::integral_serial>(s); }
void BM_IntegralCompositeParallel(benchmark::State& s) { integrate_composite<sdreal::integral>(s); }
void BM_IntegralCompositeSerial(benchmark::State& s) { integrate_composite<sdreal::integral_serial>(s); }

BENCHMARK(BM_IntegralParallel)->DenseRange(10, 16, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegralSerial)->DenseRange(10, 16, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegralCompositeParallel)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegralCompositeSerial)->DenseRange(8, 12, 2)->Unit(benchmark::kMillisecond);

// Cold: the 100-fold logistic tree built and evaluated from scratch.
void BM_T100Cold(benchmark::State& state) {
  for (auto _ : state) {
    CTree t = sdreal::to_tree(sdreal::parse("pow(logistic(2),100)"));
    benchmark::DoNotOptimize(sdreal::eval_at(t, Rational(7, 10), 100));
  }
}
BENCHMARK(BM_T100Cold)->Unit(benchmark::kMillisecond);

// Warm: the same evaluation on a tree whose path is already memoized.
void BM_T100Warm(benchmark::State& state) {
  CTree t = sdreal::to_tree(sdreal::parse("pow(logistic(2),100)"));
  sdreal::eval_at(t, Rational(7, 10), 100);
  for (auto _ : state) benchmark::DoNotOptimize(sdreal::eval_at(t, Rational(7, 10), 100));
}
BENCHMARK(BM_T100Warm)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
