#include <benchmark/benchmark.h>
#include <omp.h>

#include "tsdr/kernels.hpp"
#include "tsdr/rng.hpp"
#include "tsdr/synth.hpp"

namespace {

using tsdr::Matrix;
namespace kernels = tsdr::kernels;

Matrix Random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  tsdr::Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.Normal();
  return m;
}

// Arguments: rows, columns, OpenMP threads (0 = serial reference).
template <Matrix (*Parallel)(const Matrix&), Matrix (*Serial)(const Matrix&)>
void BM_Unary(benchmark::State& state) {
  const Matrix a = Random(state.range(0), state.range(1), 1);
  const int threads = static_cast<int>(state.range(2));
  if (threads > 0) omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(threads > 0 ? Parallel(a) : Serial(a));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * state.range(1));
}

template <Matrix (*Parallel)(const Matrix&, const Matrix&), Matrix (*Serial)(const Matrix&, const Matrix&),
          bool kTransposeLeft>
void BM_Binary(benchmark::State& state) {
  const std::size_t n = state.range(0), p = state.range(1);
  const Matrix a = Random(n, p, 1);
  const Matrix b = kTransposeLeft ? Random(n, 1, 2) : Random(p, p, 2);
  const int threads = static_cast<int>(state.range(2));
  if (threads > 0) omp_set_num_threads(threads);
  for (auto _ : state) benchmark::DoNotOptimize(threads > 0 ? Parallel(a, b) : Serial(a, b));
  state.SetItemsProcessed(state.iterations() * n * p * b.cols());
}

void KernelArgs(benchmark::internal::Benchmark* b) {
  const int max_threads = kernels::MaxThreads();
  for (long rows : {1000L, 30000L})
    for (long cols : {10L, 50L}) {
      b->Args({rows, cols, 0});
      for (int t = 1; t <= max_threads; t *= 2) b->Args({rows, cols, t});
    }
  b->ArgNames({"rows", "cols", "threads"});
}

void BM_Sweep(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(tsdr::Sweep(tsdr::SynthConfig::Defaults(), tsdr::SweepAxis::kN, {1000},
                                         tsdr::SweepOptions{.runs = 20, .seed = 1, .parallel = parallel}));
}

BENCHMARK(BM_Unary<kernels::Gram, kernels::reference::Gram>)->Name("Gram")->Apply(KernelArgs);
BENCHMARK(BM_Binary<kernels::TransposeMultiply, kernels::reference::TransposeMultiply, true>)
    ->Name("TransposeMultiply")
    ->Apply(KernelArgs);
BENCHMARK(BM_Binary<kernels::Multiply, kernels::reference::Multiply, false>)->Name("Multiply")->Apply(KernelArgs);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
