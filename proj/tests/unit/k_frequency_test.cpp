#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "rfq/oracle.hpp"
#include "rfq/range_index.hpp"
#include "test_support.hpp"

using namespace rfq;
using rfq::testing::random_colors;

TEST(KFrequency, Examples) {
  RangeFrequencyIndex index(std::vector<ColorId>{1, 2, 1, 3, 1, 2});
  const auto got = index.k_frequency(0, 5, 3);
  ASSERT_TRUE(got.found());
  EXPECT_EQ(got.color, 1u);
  EXPECT_EQ(got.frequency, 3u);
  EXPECT_EQ(index.k_frequency(0, 5, 7).status, Status::none);
  EXPECT_THROW(index.k_frequency(0, 5, 0), std::invalid_argument);
  EXPECT_EQ(index.count_with_frequency(0, 5, 2, Relation::at), 1u);
  EXPECT_EQ(index.count_with_frequency(0, 5, 2, Relation::below), 1u);
  EXPECT_EQ(index.count_with_frequency(0, 5, 2, Relation::above), 1u);
  EXPECT_EQ(index.count_with_frequency(0, 5, 1, Relation::below), 0u);
}

TEST(LeastFrequentPresent, Examples) {
  RangeFrequencyIndex index(std::vector<ColorId>{1, 1, 2, 2, 3});
  const auto got = index.least_frequent_present(0, 3);
  EXPECT_EQ(got.frequency, 2u);
  EXPECT_TRUE(got.color == 1 || got.color == 2);
  const auto single = index.least_frequent_present(4, 4);
  EXPECT_EQ(single.color, 3u);
  EXPECT_EQ(single.frequency, 1u);
}

TEST(CountWithFrequency, AllDistinct) {
  std::vector<ColorId> a(900);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 5 * i;
  RangeFrequencyIndex index(a);
  EXPECT_EQ(index.count_with_frequency(100, 799, 1, Relation::at), 700u);
  EXPECT_EQ(index.count_with_frequency(100, 799, 1, Relation::above), 0u);
}

// Cell-by-cell consistency between the interior histograms, the span
// histograms and the samplers.
void expect_interior_consistent(const RangeFrequencyIndex& index) {
  const BaseIndex& base = index.base();
  const auto& interior = index.interior();
  for (std::size_t pair = 0; pair < base.pair_count(); ++pair) {
    const auto g = interior.interior_histogram(pair);
    const auto b = base.histogram_row(pair);
    for (std::size_t f = 1; f < g.size(); ++f) {
      ASSERT_LE(g[f], b[f]) << pair << "/" << f;
      const Sampler* s = interior.sampler(pair, f);
      ASSERT_EQ(s == nullptr ? 0 : s->live_count(), g[f]) << pair << "/" << f;
    }
  }
}

TEST(Interior, SingleOccurrenceContributions) {
  std::vector<ColorId> a(600);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 1 + i % 5;
  a[300] = 77;
  RangeFrequencyIndex index(a);
  const BaseIndex& base = index.base();
  const ColorIndex c = *base.find_color(77);
  const std::size_t s = base.segment_of(base.rank_to_index(300));
  std::vector<std::uint16_t> counts;
  index.interior().interior_counts(c, counts);
  for (std::size_t j1 = 0; j1 < base.segment_count(); ++j1) {
    for (std::size_t j2 = j1 + 1; j2 <= base.segment_count(); ++j2) {
      const bool contains = j1 <= s && s < j2;
      const bool flank_free = (j1 == 0 || j1 - 1 != s) && j2 != s;
      EXPECT_EQ(counts[base.pair_index(j1, j2)], contains && flank_free ? 1 : 0);
    }
  }
  expect_interior_consistent(index);
  index.erase(300);
  index.interior().interior_counts(c, counts);
  for (const auto v : counts) EXPECT_EQ(v, 0);
  expect_interior_consistent(index);
}

TEST(Interior, ConsistentUnderChurn) {
  RangeFrequencyIndex index(random_colors(2500, 700, 14));
  std::mt19937_64 rng(14);
  for (int op = 0; op < 1200; ++op) {
    switch (rng() % 3) {
      case 0: index.set(rng() % index.size(), 1 + rng() % 700); break;
      case 1: index.insert(rng() % (index.size() + 1), 1 + rng() % 700); break;
      default: index.erase(rng() % index.size()); break;
    }
    if (op % 200 == 0) expect_interior_consistent(index);
  }
  expect_interior_consistent(index);
}

class KFrequencyFuzz : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KFrequencyFuzz, MatchesOracle) {
  const std::size_t alphabet = GetParam();
  std::mt19937_64 rng(alphabet + 5);
  const std::size_t n = 1000 + rng() % 3000;
  ReferenceArray ref(random_colors(n, alphabet, alphabet * 17));
  RangeFrequencyIndex index(ref.values());
  std::size_t failures = 0;
  for (int q = 0; q < 3000; ++q) {
    if (q % 10 == 0) {
      const std::size_t r = rng() % ref.size();
      const ColorId c = 1 + rng() % alphabet;
      index.set(r, c);
      ref.set(r, c);
    }
    std::size_t l = rng() % n;
    std::size_t r = rng() % n;
    if (l > r) std::swap(l, r);
    const std::size_t k = rng() % 2 == 0 ? 1 + rng() % 6 : 1 + rng() % (r - l + 1);
    const auto got = index.k_frequency(l, r, k);
    const auto want = oracle_kfreq(ref, l, r, k);
    if (got.status == Status::sampling_failure) {
      ++failures;
      ASSERT_FALSE(want.witnesses.empty());
    } else if (want.witnesses.empty()) {
      ASSERT_EQ(got.status, Status::none) << l << " " << r << " " << k;
    } else {
      ASSERT_TRUE(got.found()) << l << " " << r << " " << k;
      ASSERT_TRUE(want.accepts(got.color));
      ASSERT_EQ(got.frequency, k);
    }

    const auto lfp = index.least_frequent_present(l, r);
    const auto lfp_want = oracle_lfp(ref, l, r);
    ASSERT_EQ(lfp.frequency, lfp_want.frequency);
    ASSERT_TRUE(lfp_want.accepts(lfp.color));

    for (const Relation rel : {Relation::below, Relation::at, Relation::above}) {
      ASSERT_EQ(index.count_with_frequency(l, r, k, rel), oracle_countf(ref, l, r, k, rel));
    }
  }
  EXPECT_LE(failures, 1u);
}

INSTANTIATE_TEST_SUITE_P(Alphabets, KFrequencyFuzz, ::testing::Values(2, 12, 150, 1000, 4000));
