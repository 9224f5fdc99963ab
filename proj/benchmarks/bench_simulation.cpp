#include <benchmark/benchmark.h>

#include <random>

#include "carma/levy.hpp"
#include "carma/stats.hpp"

namespace {

void BM_SimulateStablePath(benchmark::State& state) {
  const auto model = carma::LevyModel::alpha_stable(1, carma::StableJumps{1.5, 1.0});
  const auto grid = carma::TimeGrid::span(-32.0, 32.0, 1.0 / static_cast<double>(state.range(0)));
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(carma::simulate_path(model, grid, 1, stream++));
  state.SetItemsProcessed(state.iterations() * grid.cells);
}
BENCHMARK(BM_SimulateStablePath)->Arg(8)->Arg(256);

void BM_DistanceCorrelation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = g(rng);
    y[i] = g(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(carma::stats::distance_correlation(x, y));
}
BENCHMARK(BM_DistanceCorrelation)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
