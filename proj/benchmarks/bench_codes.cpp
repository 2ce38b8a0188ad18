#include <benchmark/benchmark.h>

#include <vector>

#include "sideinfo/codes.hpp"
#include "sideinfo/exponents.hpp"
#include "sideinfo/measures.hpp"
#include "sideinfo/multicode.hpp"
#include "sideinfo/rng.hpp"

using namespace sideinfo;

namespace {

Dist random_joint(std::size_t size, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0));
  std::vector<double> p(size);
  double total = 0.0;
  for (auto& v : p) total += (v = exponential01(rng));
  for (auto& v : p) v /= total;
  return Dist(p, kProbTolerance);
}

const PairAlphabet kBinary{2, 2};

}  // namespace

// e_A at rate 0.8 on the DSBS block joint; arg = blocklength.
static void BM_MinAError(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  const auto model = SingleLetterModel::iid(dsbs(0.1), kBinary);
  const Dist joint = block_joint(model, n);
  const auto block = kBinary.block(n);
  const auto size = message_count(n, 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(min_a_error(joint, block, size));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(block.total()));
}
BENCHMARK(BM_MinAError)->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);

// Exhaustive binning search; arg = |X1| with |X2| = 3 and M = 3.
static void BM_OptimalBCode(benchmark::State& state) {
  const PairAlphabet a{static_cast<std::uint64_t>(state.range(0)), 3};
  const Dist joint = random_joint(a.total(), 7);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_b_code(joint, a, 3).error);
}
BENCHMARK(BM_OptimalBCode)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

// k+1 jointly decoded B-codes; arg = k.
static void BM_BestMultiB(benchmark::State& state) {
  const PairAlphabet a{5, 2};
  const Dist joint = random_joint(a.total(), 8);
  const auto k = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(best_multi_b(joint, a, 2, k, kDefaultSearchBudget, 1).miss_probability);
}
BENCHMARK(BM_BestMultiB)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_RhoHighRate(benchmark::State& state) {
  const auto model = SingleLetterModel::iid(dsbs(0.1), kBinary);
  for (auto _ : state) benchmark::DoNotOptimize(rho_high_rate(model, 0.8, 0.01));
}
BENCHMARK(BM_RhoHighRate)->Unit(benchmark::kMillisecond);

static void BM_RhoLowRate(benchmark::State& state) {
  const auto model = SingleLetterModel::iid(dsbs(0.1), kBinary);
  for (auto _ : state) benchmark::DoNotOptimize(rho_low_rate(model, 0.2, 0.01));
}
BENCHMARK(BM_RhoLowRate)->Unit(benchmark::kMillisecond);

// Four nested events over an alphabet of size arg.
static void BM_RecursiveTilt(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  const Dist mu = random_joint(size, 9);
  const Dist u = Dist::uniform(size);
  std::vector<EventSet> events;
  for (std::size_t keep = size; keep > size / 2 && events.size() < 4; --keep) {
    EventSet e(size);
    for (std::size_t i = 0; i < keep; ++i) e.set(i);
    events.push_back(e);
  }
  for (auto _ : state) benchmark::DoNotOptimize(recursive_tilt(mu, u, events).divergence_bits);
}
BENCHMARK(BM_RecursiveTilt)->RangeMultiplier(8)->Range(8, 4096);

BENCHMARK_MAIN();
