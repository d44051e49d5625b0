#include <benchmark/benchmark.h>

#include <vector>

#include "capsfx/kernels.hpp"
#include "capsfx/rng.hpp"
#include "capsfx/routing.hpp"
#include "capsfx/softmax.hpp"
#include "capsfx/squash.hpp"

namespace {

using namespace capsfx;

const QFormat kFmt{16, 10};

std::vector<FxValue> random_vector(int n, double lo, double hi, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<FxValue> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) v.push_back(FxValue::from_real(rng.uniform(lo, hi), kFmt));
  return v;
}

void BM_Pow2Linear(benchmark::State& state) {
  const auto x = random_vector(1024, -8.0, 4.0, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pow2_linear(x[i++ & 1023]));
  }
}
BENCHMARK(BM_Pow2Linear);

void BM_Log2Linear(benchmark::State& state) {
  const auto x = random_vector(1024, 0.01, 30.0, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log2_linear(x[i++ & 1023]));
  }
}
BENCHMARK(BM_Log2Linear);

void BM_Softmax(benchmark::State& state, SoftmaxVariant variant) {
  const SoftmaxImpl impl(variant);
  const auto x = random_vector(static_cast<int>(state.range(0)), -8.0, 8.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(impl.apply(x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Softmax, taylor, SoftmaxVariant::kTaylor)->Arg(10)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_Softmax, lnu, SoftmaxVariant::kLnu)->Arg(10)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_Softmax, b2, SoftmaxVariant::kB2)->Arg(10)->Arg(32)->Arg(128);

void BM_Squash(benchmark::State& state, SquashVariant variant) {
  const SquashImpl impl(variant);
  const auto x = random_vector(static_cast<int>(state.range(0)), -1.0, 1.0, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(impl.apply(x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Squash, norm, SquashVariant::kNorm)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_Squash, exp, SquashVariant::kExp)->Arg(4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_Squash, pow2, SquashVariant::kPow2)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_DynamicRouting(benchmark::State& state) {
  const RoutingConfig cfg{32, 10, 16, 3, SoftmaxImpl(SoftmaxVariant::kB2),
                          SquashImpl(SquashVariant::kPow2)};
  const Predictions p = Predictions::random(32, 10, 16, kFmt, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamic_routing(p, cfg));
  }
}
BENCHMARK(BM_DynamicRouting);

}  // namespace

BENCHMARK_MAIN();
