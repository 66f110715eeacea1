#include <benchmark/benchmark.h>

#include "numgeo/density.hpp"
#include "numgeo/procrustes.hpp"
#include "numgeo/stats.hpp"
#include "numgeo/subspace.hpp"
#include "numgeo/synthesize.hpp"

using namespace numgeo;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  CounterRng rng(RngSeed{seed}, 1);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_Procrustes(benchmark::State& state) {
  const auto d = state.range(0);
  const auto x = gaussian(9, d, 1), y = gaussian(9, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(procrustes(x, y, {.compute_rotation = false}).disparity);
}
BENCHMARK(BM_Procrustes)->Arg(16)->Arg(64)->Arg(4096);

void BM_ProcrustesWithRotation(benchmark::State& state) {
  const auto d = state.range(0);
  const auto x = gaussian(9, d, 1), y = gaussian(9, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(procrustes(x, y).disparity);
}
BENCHMARK(BM_ProcrustesWithRotation)->Arg(16)->Arg(64);

void BM_PermutationBaseline(benchmark::State& state) {
  const auto x = gaussian(9, 64, 1), y = gaussian(9, 64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(procrustes_permutation_baseline(x, y, 999, RngSeed{3}).mean);
  }
}
BENCHMARK(BM_PermutationBaseline)->Unit(benchmark::kMillisecond);

void BM_Svcca(benchmark::State& state) {
  const auto d = state.range(0);
  const auto x = gaussian(45, d, 1), y = gaussian(45, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(svcca(x, y, 5).mean_rho);
}
BENCHMARK(BM_Svcca)->Arg(64)->Arg(1024);

void BM_PermutationPvalue(benchmark::State& state) {
  const auto m = gaussian(36, 2, 4);
  std::vector<double> x(m.col(0).begin(), m.col(0).end()), y(m.col(1).begin(), m.col(1).end());
  const double r = pearson(x, y);
  for (auto _ : state) benchmark::DoNotOptimize(permutation_pvalue(x, y, r, 10000, RngSeed{5}));
}
BENCHMARK(BM_PermutationPvalue)->Unit(benchmark::kMillisecond);

void BM_Kde(benchmark::State& state) {
  const auto points = gaussian(state.range(0), 2, 6);
  for (auto _ : state) benchmark::DoNotOptimize(kde_density(points, 64).level80);
}
BENCHMARK(BM_Kde)->Arg(55)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
