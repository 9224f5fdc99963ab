#include <benchmark/benchmark.h>

#include "carma/polyalg.hpp"
#include "carma/spectral.hpp"
#include "carma/statespace.hpp"

namespace {

carma::MatrixPolyPair car21() { return carma::MatrixPolyPair::scalar({3.0, 2.0}, {1.0, 0.5}); }

void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(carma::expm(A, 1.3));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(6)->Arg(16);

void BM_KernelExpansion(benchmark::State& state) {
  const auto pq = car21();
  for (auto _ : state) benchmark::DoNotOptimize(carma::kernel_expansion(pq, carma::spectrum(pq)));
}
BENCHMARK(BM_KernelExpansion);

void BM_KernelEval(benchmark::State& state) {
  const auto pq = car21();
  const auto ke = carma::kernel_expansion(pq, carma::spectrum(pq));
  double t = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(carma::kernel_eval(ke, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_KernelEval);

void BM_FftOracle(benchmark::State& state) {
  const auto pq = car21();
  for (auto _ : state) benchmark::DoNotOptimize(carma::kernel_fft_oracle(pq, -5.0, 0.05, 301));
}
BENCHMARK(BM_FftOracle)->Unit(benchmark::kMillisecond);

void BM_FejerAntiderivative(benchmark::State& state) {
  double x = -200.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(carma::fejer_antiderivative(x));
    x = x > 200.0 ? -200.0 : x + 0.37;
  }
}
BENCHMARK(BM_FejerAntiderivative);

}  // namespace
