#include <benchmark/benchmark.h>

#include "cosmicbell/bellsim.hpp"
#include "cosmicbell/causal.hpp"
#include "cosmicbell/cosmology.hpp"
#include "cosmicbell/photonstat.hpp"
#include "cosmicbell/randomness.hpp"

namespace {

using namespace cosmicbell;

void BM_ComovingDistance(benchmark::State& state) {
  const CosmologyParams params;
  const double z = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(comoving_distance(z, params));
  }
}
BENCHMARK(BM_ComovingDistance)->Arg(1)->Arg(100)->Arg(1090);

void BM_ConformalTime(benchmark::State& state) {
  const CosmologyParams params;
  const double z = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(conformal_time(z, params));
  }
}
BENCHMARK(BM_ConformalTime)->Arg(1)->Arg(1090);

void BM_ThresholdRedshift(benchmark::State& state) {
  const CosmologyParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_redshift(130.0, 2, params));
  }
}
BENCHMARK(BM_ThresholdRedshift);

void BM_ChshTrials(benchmark::State& state) {
  const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto run =
        run_chsh(QuantumModel{}, ChshAngles::canonical(), n, seed++);
    benchmark::DoNotOptimize(run.stats.s_value);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ChshTrials)->Arg(10000)->Arg(100000);

void BM_WhitenedBits(benchmark::State& state) {
  const auto stream = simulate_arrivals(1e4, 10.0, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(whitened_bits(stream, 8));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream.arrival_times_s.size()));
}
BENCHMARK(BM_WhitenedBits);

void BM_CoincidenceProbability(benchmark::State& state) {
  const std::vector<double> mus{1.31, 1.31, 1.31};
  for (auto _ : state) {
    benchmark::DoNotOptimize(coincidence_probability(mus));
  }
}
BENCHMARK(BM_CoincidenceProbability);

}  // namespace

BENCHMARK_MAIN();
