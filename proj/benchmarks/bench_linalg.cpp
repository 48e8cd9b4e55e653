#include <benchmark/benchmark.h>

#include "ulab/linalg.hpp"
#include "ulab/measurement.hpp"

namespace {

void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ulab::Rng rng(1);
  const ulab::Matrix x = ulab::gaussian_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ulab::svd(x));
}
BENCHMARK(BM_Svd)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_HouseholderQR(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ulab::Rng rng(2);
  const ulab::Matrix a = ulab::gaussian_matrix(n * n, n * n / 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ulab::HouseholderQR(a));
}
BENCHMARK(BM_HouseholderQR)->Arg(6)->Arg(10);

void BM_ProjectAffine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ulab::Rng rng(3);
  const auto op = ulab::sample_gaussian_operator(n, 4 * n, rng);
  const ulab::Matrix x = ulab::gaussian_matrix(n, n, rng);
  const ulab::Vector y = op.apply(ulab::gaussian_matrix(n, n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(op.project_affine(x, y));
}
BENCHMARK(BM_ProjectAffine)->Arg(8)->Arg(16);

}  // namespace
