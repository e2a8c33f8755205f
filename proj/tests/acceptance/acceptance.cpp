// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rfq/oracle.hpp"
#include "rfq/range_index.hpp"
#include "rfq/tiered_seq.hpp"
#include "rfq/xor_sampler.hpp"

using namespace rfq;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Criteria 1 and 2 share the same runs: the differential driver checks every
// query against the oracle and recounts all tables every 100 ops.
void oracle_and_structure() {
  struct Run {
    std::uint64_t seed;
    std::size_t colors;
  };
  // Narrow (at most 16 colors) and wide (at least half the size) alphabets.
  const std::vector<Run> runs{{1, 16}, {2, 4096}, {3, 5}, {4, 3000}, {5, 12}};
  std::size_t divergences = 0;
  std::size_t failures_seen = 0;
  std::size_t queries = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first;
  const auto start = std::chrono::steady_clock::now();
  for (const Run& run : runs) {
    DiffConfig config;
    config.seed = run.seed;
    config.ops = 10000;
    config.max_n = 4096;
    config.colors = run.colors;
    config.verify_every = 100;
    const DiffReport r = differential_run(config);
    divergences += r.divergences;
    failures_seen += r.sampling_failures;
    queries += r.queries;
    checks += r.structure_checks;
    violations += r.structure_violations;
    if (first.empty() && !r.first_divergence.empty()) {
      first = fmt(" first (seed %llu): %s", static_cast<unsigned long long>(run.seed), r.first_divergence.c_str());
    }
  }
  const double elapsed = seconds_since(start);
  report(1, "oracle equivalence", divergences == 0 && failures_seen <= 1,
         fmt("%zu queries over 5 seeds, %zu divergences, %zu sampling failures (limit 1), %.1fs%s", queries,
             divergences, failures_seen, elapsed, first.c_str()));
  report(2, "structural recount", violations == 0 && checks == 500,
         fmt("%zu recounts, %zu violations", checks, violations));
}

void sampler_statistics() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(31337);
  const std::size_t states = 100000;
  std::size_t copy_trials = 0;
  std::size_t copy_hits = 0;
  std::unique_ptr<Sampler> sampler;
  std::vector<std::uint64_t> live;
  for (std::size_t state = 0; state < states; ++state) {
    if (state % 100 == 0) {
      sampler = std::make_unique<Sampler>(1024, 2, rng());
      live.clear();
    }
    const std::size_t k = 1 + rng() % 512;
    while (live.size() < k) {
      const std::uint64_t x = rng();
      sampler->insert(x);
      live.push_back(x);
    }
    while (live.size() > k) {
      const std::size_t at = rng() % live.size();
      sampler->remove(live[at]);
      live[at] = live.back();
      live.pop_back();
    }
    for (std::size_t copy = 0; copy < sampler->copies(); ++copy) {
      ++copy_trials;
      if (sampler->retrieve_from_copy(copy).status == RetrieveStatus::found) ++copy_hits;
    }
  }
  const double rate = static_cast<double>(copy_hits) / static_cast<double>(copy_trials);

  const std::size_t draws = 1000000;
  std::vector<std::size_t> at_level(5, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const unsigned level = level_of(rng(), rng());
    if (level <= 4) ++at_level[level];
  }
  double worst = 0;
  for (unsigned level = 1; level <= 4; ++level) {
    const double observed = static_cast<double>(at_level[level]) / static_cast<double>(draws);
    worst = std::max(worst, std::abs(observed - std::ldexp(1.0, -static_cast<int>(level))));
  }
  report(3, "sampler statistics", rate >= 0.03 && worst <= 0.01,
         fmt("per-copy success %.4f (min 0.03) over %zu states; max level-law error %.4f (max 0.01); %.1fs",
             rate, states, worst, seconds_since(start)));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Medians of MODE and SET latency on random arrays with n / 8 colors. The
// sizes are measured in alternating rounds so that a slow stretch of the
// machine does not land on one size only; each size's time is the median of
// its per-round medians.
void scaling() {
  const auto start = std::chrono::steady_clock::now();
  using Clock = std::chrono::steady_clock;
  const std::vector<std::size_t> sizes{std::size_t{1} << 12, std::size_t{1} << 15, std::size_t{1} << 18};
  const std::size_t rounds = 7;
  const std::size_t per_round = 101;
  const std::size_t warmup = 10;

  struct Bench {
    std::unique_ptr<RangeFrequencyIndex> index;
    std::mt19937_64 rng;
    std::vector<double> mode_p50;
    std::vector<double> set_p50;
  };
  std::vector<Bench> benches;
  for (const std::size_t n : sizes) {
    Bench b{nullptr, std::mt19937_64(n * 31 + 4), {}, {}};
    std::vector<ColorId> values(n);
    for (auto& v : values) v = b.rng() % (n / 8);
    b.index = std::make_unique<RangeFrequencyIndex>(values);
    benches.push_back(std::move(b));
  }

  std::vector<double> samples;
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const std::size_t n = sizes[i];
      Bench& b = benches[i];
      std::size_t sink = 0;
      samples.clear();
      for (std::size_t q = 0; q < warmup + per_round; ++q) {
        std::size_t l = b.rng() % n;
        std::size_t r = b.rng() % n;
        if (l > r) std::swap(l, r);
        const auto t0 = Clock::now();
        sink += b.index->mode(l, r).frequency;
        const auto t1 = Clock::now();
        if (q >= warmup) samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
      }
      b.mode_p50.push_back(median(samples));
      samples.clear();
      for (std::size_t q = 0; q < warmup + per_round; ++q) {
        const std::size_t at = b.rng() % n;
        const ColorId c = b.rng() % (n / 8);
        const auto t0 = Clock::now();
        b.index->set(at, c);
        const auto t1 = Clock::now();
        if (q >= warmup) samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
      }
      b.set_p50.push_back(median(samples));
      if (sink == 0) std::printf("unexpected empty answers\n");
    }
  }

  std::vector<double> totals;
  std::vector<double> modes;
  std::vector<double> sets;
  std::string detail;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    modes.push_back(median(benches[i].mode_p50));
    sets.push_back(median(benches[i].set_p50));
    totals.push_back(modes.back() + sets.back());
    detail += fmt("n=%zu mode %.1fus set %.1fus; ", sizes[i], modes.back() / 1e3, sets.back() / 1e3);
  }
  bool ok = true;
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const double ratio = totals[i] / totals[i - 1];
    detail += fmt("t(8n)/t(n) at n=%zu: %.2f (mode %.2f, set %.2f); ", sizes[i - 1], ratio,
                  modes[i] / modes[i - 1], sets[i] / sets[i - 1]);
    ok = ok && ratio >= 2.0 && ratio <= 8.0;
  }
  detail += fmt("%.1fs", seconds_since(start));
  report(4, "scaling", ok, detail);
}

void space() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = std::size_t{1} << 18;
  std::mt19937_64 rng(8);
  std::vector<ColorId> values(n);
  for (auto& v : values) v = rng() % (n / 8);
  RangeFrequencyIndex index(values);
  const IndexStats stats = index.stats();

  const BaseIndex& base = index.base();
  std::size_t mismatched = 0;
  std::size_t cells = 0;
  for (std::size_t pair = 0; pair < base.pair_count(); ++pair) {
    const auto g = index.interior().interior_histogram(pair);
    for (std::size_t f = 1; f < g.size(); ++f) {
      const Sampler* s = index.interior().sampler(pair, f);
      ++cells;
      if ((s == nullptr ? 0 : s->live_count()) != g[f]) ++mismatched;
    }
  }
  report(5, "space", stats.table_words <= 8 * n && mismatched == 0,
         fmt("table words %zu <= %zu; %zu of %zu sampler cells disagree with their histogram entry; %.1fs",
             stats.table_words, 8 * n, mismatched, cells, seconds_since(start)));
}

void dynamic_array() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(66);
  TieredSeq<std::uint32_t> seq;
  std::vector<std::uint32_t> flat;
  const std::size_t ops = 100000;
  const std::size_t ids = ops + 2000;
  std::vector<ElemHandle> handles(ids);
  std::uint32_t next_id = 0;
  std::size_t mismatches = 0;
  std::size_t bad_handles = 0;
  double size_sum = 0;
  for (std::size_t i = 0; i < 1500; ++i) {
    seq.push_back(next_id, &handles[next_id]);
    flat.push_back(next_id++);
  }
  const std::uint64_t moves_before = seq.moves();
  for (std::size_t op = 0; op < ops; ++op) {
    const unsigned kind = rng() % 8;
    if (flat.empty() || kind < 3) {
      const std::size_t rank = rng() % (flat.size() + 1);
      seq.insert(rank, next_id, &handles[next_id]);
      flat.insert(flat.begin() + static_cast<std::ptrdiff_t>(rank), next_id++);
    } else if (kind < 6) {
      const std::size_t rank = rng() % flat.size();
      seq.erase(rank);
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(rank));
    } else {
      const std::size_t rank = rng() % flat.size();
      if (seq.get(rank) != flat[rank]) ++mismatches;
    }
    size_sum += static_cast<double>(flat.size());
    for (std::size_t r = 0; r < flat.size(); ++r) {
      if (seq.rank_of(handles[flat[r]]) != r) ++bad_handles;
    }
  }
  if (seq.to_vector() != flat) ++mismatches;
  const double mean_n = size_sum / static_cast<double>(ops);
  const double per_op = static_cast<double>(seq.moves() - moves_before) / static_cast<double>(ops);
  const double factor = per_op / std::sqrt(mean_n);
  report(6, "dynamic array", mismatches == 0 && bad_handles == 0 && factor <= 4.0,
         fmt("%zu ops, %zu mismatches, %zu stale handles, %.1f moves/op = %.2f sqrt(n) at mean n %.0f (max 4); %.1fs",
             ops, mismatches, bad_handles, per_op, factor, mean_n, seconds_since(start)));
}

void rebuild_amortization() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n0 = 4096;
  std::mt19937_64 rng(77);
  std::vector<ColorId> values(n0);
  for (auto& v : values) v = rng() % (n0 / 8);
  RangeFrequencyIndex index(values);
  const std::uint64_t before = index.base().rebuild_moves();
  const std::uint64_t rebuilds_before = index.base().rebuild_count();
  const std::size_t ops = 10000;
  for (std::size_t op = 0; op < ops; ++op) index.insert(rng() % (index.size() + 1), rng() % (n0 / 8));
  const double per_op = static_cast<double>(index.base().rebuild_moves() - before) / static_cast<double>(ops);
  const double limit = 64.0 * std::cbrt(static_cast<double>(n0) * static_cast<double>(n0));
  report(7, "rebuild amortization", per_op <= limit,
         fmt("%llu rebuilds, %.1f moved elements per insert (limit %.0f); %.1fs",
             static_cast<unsigned long long>(index.base().rebuild_count() - rebuilds_before), per_op, limit,
             seconds_since(start)));
}

}  // namespace

int main() {
  oracle_and_structure();
  sampler_statistics();
  scaling();
  space();
  dynamic_array();
  rebuild_amortization();
  std::printf("%s\n", failures == 0 ? "ALL PASS" : "SOME FAILED");
  return failures == 0 ? 0 : 1;
}
