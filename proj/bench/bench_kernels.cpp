// OpenMP grid kernels against their serial references.

#include "s3sigma/quantum.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace s3sigma;

namespace {

const SpaceConfig kCfg{};

const QuadGrid& grid() {
  static const QuadGrid g = build_grid(24, 16, 32, kCfg);
  return g;
}

const Basis& basis() {
  static const Basis b(5, kCfg);
  return b;
}

const Eigen::MatrixXcd& samples() {
  static const Eigen::MatrixXcd s = sample_on_grid_serial(basis().functions(), grid());
  return s;
}

cplx integrand(const HypersphericalNode& n) {
  return std::exp(cplx(0.0, 1.0) * n.x(1)) * std::cos(3.0 * n.x(2)) * n.x(0);
}

void BM_sample_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sample_on_grid(basis().functions(), grid()));
}
void BM_sample_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sample_on_grid_serial(basis().functions(), grid()));
}
void BM_gram_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(gram(samples(), samples(), grid()));
}
void BM_gram_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(gram_serial(samples(), samples(), grid()));
}
void BM_integrate_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(integrate(integrand, grid()));
}
void BM_integrate_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(integrate_serial(integrand, grid()));
}

}  // namespace

BENCHMARK(BM_sample_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
