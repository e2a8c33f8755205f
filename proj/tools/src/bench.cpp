#include "rfq_cli/bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

#include "rfq/range_index.hpp"

namespace rfq::cli {

namespace {

using Clock = std::chrono::steady_clock;

BenchRow summarize(std::size_t n, std::string op, std::vector<double> samples) {
  BenchRow row;
  row.n = n;
  row.op = std::move(op);
  row.ops_run = samples.size();
  if (samples.empty()) return row;
  std::sort(samples.begin(), samples.end());
  row.mean_ns = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  auto pct = [&](double p) {
    const auto at = static_cast<std::size_t>(p * static_cast<double>(samples.size() - 1) + 0.5);
    return samples[at];
  };
  row.p50_ns = pct(0.50);
  row.p99_ns = pct(0.99);
  return row;
}

double time_ns(const std::function<void()>& body) {
  const auto start = Clock::now();
  body();
  return std::chrono::duration<double, std::nano>(Clock::now() - start).count();
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  std::vector<BenchRow> rows;
  auto wanted = [&](const std::string& op) {
    return config.only.empty() || std::find(config.only.begin(), config.only.end(), op) != config.only.end();
  };

  for (const std::size_t n : config.sizes) {
    std::mt19937_64 rng(config.seed ^ (n * 0x9e3779b97f4a7c15ULL));
    const std::size_t colors = std::max<std::size_t>(2, n / std::max<std::size_t>(1, config.alphabet_divisor));
    auto uniform = [&](std::size_t lo, std::size_t hi) {
      return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::vector<ColorId> values(n);
    for (auto& v : values) v = uniform(0, colors - 1);

    Params params;
    params.sampler_c = config.sampler_c;
    params.seed = config.seed;
    RangeFrequencyIndex index(params);
    const double build_ns = time_ns([&] { index.assign(values); });
    if (wanted("build")) rows.push_back(summarize(n, "build", {build_ns}));

    std::vector<std::pair<std::size_t, std::size_t>> ranges(config.ops);
    for (auto& [l, r] : ranges) {
      l = uniform(0, n - 1);
      r = uniform(0, n - 1);
      if (l > r) std::swap(l, r);
    }
    // Frequencies that occur in their range, so KFREQ has work to do.
    std::vector<std::size_t> ks(config.ops);
    for (std::size_t i = 0; i < config.ops; ++i) {
      const auto [l, r] = ranges[i];
      const ColorId c = values[uniform(l, r)];
      ks[i] = static_cast<std::size_t>(std::count(values.begin() + static_cast<std::ptrdiff_t>(l),
                                                  values.begin() + static_cast<std::ptrdiff_t>(r) + 1, c));
    }

    auto run_queries = [&](const std::string& op, const std::function<void(std::size_t)>& one) {
      if (!wanted(op)) return;
      std::vector<double> samples;
      samples.reserve(config.ops);
      for (std::size_t i = 0; i < config.ops; ++i) samples.push_back(time_ns([&] { one(i); }));
      rows.push_back(summarize(n, op, std::move(samples)));
    };
    volatile std::size_t sink = 0;
    run_queries("MODE", [&](std::size_t i) { sink = index.mode(ranges[i].first, ranges[i].second).frequency; });
    run_queries("LFZ", [&](std::size_t i) {
      sink = index.least_frequent_zero(ranges[i].first, ranges[i].second).frequency;
    });
    run_queries("LFP", [&](std::size_t i) {
      sink = index.least_frequent_present(ranges[i].first, ranges[i].second).frequency;
    });
    run_queries("KFREQ", [&](std::size_t i) {
      sink = index.k_frequency(ranges[i].first, ranges[i].second, ks[i]).frequency;
    });
    run_queries("COUNTF", [&](std::size_t i) {
      sink = index.count_with_frequency(ranges[i].first, ranges[i].second, ks[i], Relation::below);
    });

    std::vector<std::size_t> ranks(config.ops);
    std::vector<ColorId> picks(config.ops);
    for (std::size_t i = 0; i < config.ops; ++i) {
      ranks[i] = uniform(0, n - 1);
      picks[i] = uniform(0, colors - 1);
    }
    run_queries("SET", [&](std::size_t i) { index.set(ranks[i], picks[i]); });
    run_queries("INS", [&](std::size_t i) { index.insert(ranks[i], picks[i]); });
    run_queries("DEL", [&](std::size_t i) { index.erase(ranks[i] % index.size()); });
    (void)sink;
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,op,ops_run,mean_ns,p50_ns,p99_ns\n";
  for (const BenchRow& r : rows) {
    out << r.n << ',' << r.op << ',' << r.ops_run << ',' << static_cast<std::uint64_t>(r.mean_ns) << ','
        << static_cast<std::uint64_t>(r.p50_ns) << ',' << static_cast<std::uint64_t>(r.p99_ns) << '\n';
  }
}

}  // namespace rfq::cli
