#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>
#include <vector>

#include "rfq/range_index.hpp"

using namespace rfq;

namespace {

struct Fixture {
  std::unique_ptr<RangeFrequencyIndex> index;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::mt19937_64 rng{1};
};

// One index per size, reused across benchmarks.
Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  Fixture& f = cache[n];
  if (!f.index) {
    std::vector<ColorId> values(n);
    for (auto& v : values) v = f.rng() % (n / 8);
    f.index = std::make_unique<RangeFrequencyIndex>(values);
    f.ranges.resize(1024);
    for (auto& [l, r] : f.ranges) {
      l = f.rng() % n;
      r = f.rng() % n;
      if (l > r) std::swap(l, r);
    }
  }
  return f;
}

template <typename Query>
void run_queries(benchmark::State& state, Query query) {
  Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto [l, r] = f.ranges[i++ % f.ranges.size()];
    benchmark::DoNotOptimize(query(*f.index, l, r));
  }
}

void BM_Mode(benchmark::State& state) {
  run_queries(state, [](const RangeFrequencyIndex& x, std::size_t l, std::size_t r) { return x.mode(l, r); });
}

void BM_LeastFrequentZero(benchmark::State& state) {
  run_queries(state, [](const RangeFrequencyIndex& x, std::size_t l, std::size_t r) {
    return x.least_frequent_zero(l, r);
  });
}

void BM_LeastFrequentPresent(benchmark::State& state) {
  run_queries(state, [](const RangeFrequencyIndex& x, std::size_t l, std::size_t r) {
    return x.least_frequent_present(l, r);
  });
}

void BM_KFrequency(benchmark::State& state) {
  run_queries(state, [](const RangeFrequencyIndex& x, std::size_t l, std::size_t r) {
    return x.k_frequency(l, r, 2);
  });
}

void BM_CountAbove(benchmark::State& state) {
  run_queries(state, [](const RangeFrequencyIndex& x, std::size_t l, std::size_t r) {
    return x.count_with_frequency(l, r, 2, Relation::above);
  });
}

void BM_Set(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Fixture& f = fixture(n);
  for (auto _ : state) f.index->set(f.rng() % n, f.rng() % (n / 8));
}

void BM_InsertErase(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Fixture& f = fixture(n);
  for (auto _ : state) {
    f.index->insert(f.rng() % (n + 1), f.rng() % (n / 8));
    f.index->erase(f.rng() % (n + 1));
  }
}

void BM_Build(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::vector<ColorId> values(n);
  for (auto& v : values) v = rng() % (n / 8);
  for (auto _ : state) {
    RangeFrequencyIndex index(values);
    benchmark::DoNotOptimize(index.size());
  }
}

}  // namespace

BENCHMARK(BM_Mode)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_LeastFrequentZero)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_LeastFrequentPresent)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_KFrequency)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_CountAbove)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_Set)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_InsertErase)->RangeMultiplier(8)->Range(1 << 12, 1 << 15);
BENCHMARK(BM_Build)->RangeMultiplier(8)->Range(1 << 12, 1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
