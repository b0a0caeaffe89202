#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fpld/cumulants.hpp"
#include "fpld/estimators.hpp"
#include "fpld/oracle.hpp"
#include "fpld/overlap.hpp"
#include "fpld/priors.hpp"
#include "fpld/rng.hpp"
#include "fpld/specfun.hpp"

using namespace fpld;

static void BM_LogBesselK(benchmark::State& state) {
  const double nu = static_cast<double>(state.range(0));
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_bessel_k(nu, x));
    x = x < 50.0 ? x * 1.07 : 0.5;
  }
}
BENCHMARK(BM_LogBesselK)->Arg(0)->Arg(10)->Arg(100)->Arg(500);

static void BM_ExactPmfSparse(benchmark::State& state) {
  const long n = state.range(0);
  const long k = static_cast<long>(std::lround(std::sqrt(static_cast<double>(n))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_pmf_sparse_rademacher(n, k, 3));
  }
}
BENCHMARK(BM_ExactPmfSparse)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Quantile(benchmark::State& state) {
  const auto dist = exact_pmf_sparse_rademacher(10000, 100, 1);
  const double D = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantile(dist, D));
  }
}
BENCHMARK(BM_Quantile)->Arg(2)->Arg(10)->Arg(40);

static void BM_CumulantPartition(benchmark::State& state) {
  const auto oracle = prior_moment_oracle(PriorModel::sparse_rademacher_tensor(8, 3, 1));
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> vars(m);
  for (std::size_t i = 0; i < m; ++i) vars[i] = i % 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cumulant_partition(oracle, vars));
  }
}
BENCHMARK(BM_CumulantPartition)->DenseRange(2, 8, 2);

static void BM_OracleRademacher(benchmark::State& state) {
  const auto prior = PriorModel::sparse_rademacher_tensor(1, 1, 1);
  const int D = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_corr_and_mmse(prior, 0.5, D));
  }
}
BENCHMARK(BM_OracleRademacher)->Arg(2)->Arg(6)->Arg(12);

static void BM_WeightW(benchmark::State& state) {
  const std::size_t N = static_cast<std::size_t>(state.range(0));
  const int D = static_cast<int>(state.range(1));
  Rng rng(7);
  std::vector<double> y(N), x(N, 0.0);
  for (auto& v : y) v = rng.normal();
  for (std::size_t i = 0; i < N; i += 8) x[i] = rng.sign();
  for (auto _ : state) {
    benchmark::DoNotOptimize(weight_w(y, x, D));
  }
}
BENCHMARK(BM_WeightW)->Args({64, 4})->Args({1024, 4})->Args({1024, 16});

static void BM_LowerBoundMc(benchmark::State& state) {
  const auto prior = PriorModel::sparse_rademacher_tensor(200, 20, 1);
  const std::size_t M = static_cast<std::size_t>(state.range(0));
  const Rng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(corr_lower_bound_overlap(prior, 1.0, 3, M, rng));
  }
}
BENCHMARK(BM_LowerBoundMc)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
