#include <benchmark/benchmark.h>

#include "ulab/harness.hpp"
#include "ulab/solvers.hpp"

namespace {

ulab::Matrix rank_one(std::size_t n, ulab::Rng& rng) { return ulab::draw_low_rank(n, 1, rng); }

void BM_Svt(benchmark::State& state) {
  ulab::Rng rng(4);
  const ulab::Matrix x = ulab::gaussian_matrix(10, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ulab::svt(x, 1.0));
}
BENCHMARK(BM_Svt);

void BM_NuclearMin(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  ulab::Rng rng(5);
  const auto op = ulab::sample_gaussian_operator(10, m, rng);
  const ulab::Vector y = op.apply(rank_one(10, rng));
  for (auto _ : state) benchmark::DoNotOptimize(ulab::nuclear_min(op, y));
}
BENCHMARK(BM_NuclearMin)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_RankFeasibility(benchmark::State& state) {
  ulab::Rng rng(6);
  const auto op = ulab::sample_gaussian_operator(8, 16, rng);
  const ulab::Vector y = op.apply(rank_one(8, rng));
  for (auto _ : state) benchmark::DoNotOptimize(ulab::rank_feasibility(op, y, 1));
}
BENCHMARK(BM_RankFeasibility)->Unit(benchmark::kMillisecond);

void BM_NullspaceSearchSingleRestart(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto op = ulab::sample_gaussian_operator(8, m, 7);
  ulab::SolverParams p;
  p.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ulab::nullspace_rank_search(op, 2, p));
}
BENCHMARK(BM_NullspaceSearchSingleRestart)->Arg(10)->Arg(28)->Unit(benchmark::kMillisecond);

}  // namespace
