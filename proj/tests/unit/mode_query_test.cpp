#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "rfq/mode_query.hpp"
#include "rfq/oracle.hpp"
#include "rfq/range_index.hpp"
#include "rfq/scratch.hpp"
#include "test_support.hpp"

using namespace rfq;
using rfq::testing::random_colors;

TEST(RangeMode, Example) {
  RangeFrequencyIndex index(std::vector<ColorId>{1, 2, 1, 3, 1, 2});
  const auto m = index.mode(0, 5);
  EXPECT_EQ(m.frequency, 3u);
  EXPECT_EQ(m.color, 1u);
}

TEST(RangeMode, SingleElementRange) {
  const auto a = random_colors(300, 20, 1);
  RangeFrequencyIndex index(a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto m = index.mode(i, i);
    EXPECT_EQ(m.color, a[i]);
    EXPECT_EQ(m.frequency, 1u);
  }
}

TEST(RangeMode, OutOfRange) {
  RangeFrequencyIndex index(std::vector<ColorId>{1, 2, 3});
  EXPECT_THROW(index.mode(0, 3), std::out_of_range);
  EXPECT_THROW(index.mode(2, 1), std::out_of_range);
}

TEST(SmallRangeMode, WithinOneSegmentAndScratchClean) {
  const auto a = random_colors(2000, 15, 2);
  RangeFrequencyIndex index(a);
  const ReferenceArray ref(a);
  const std::size_t w = index.base().half_width();
  std::mt19937_64 rng(2);
  for (int q = 0; q < 500; ++q) {
    const std::size_t l = rng() % a.size();
    const std::size_t r = std::min(a.size() - 1, l + rng() % w);
    const auto got = small_range_mode(index.base(), l, r);
    EXPECT_EQ(got.frequency, oracle_mode(ref, l, r).frequency);
    EXPECT_TRUE(ScratchGuard::thread_table().clean());
  }
}

class RangeModeFuzz : public ::testing::TestWithParam<std::size_t> {};

TEST_P(RangeModeFuzz, MatchesOracle) {
  const std::size_t alphabet = GetParam();
  std::mt19937_64 rng(alphabet);
  const std::size_t n = 1000 + rng() % 3000;
  const auto a = random_colors(n, alphabet, alphabet * 7);
  RangeFrequencyIndex index(a);
  const ReferenceArray ref(a);
  for (int q = 0; q < 2500; ++q) {
    std::size_t l = rng() % n;
    std::size_t r = rng() % n;
    if (l > r) std::swap(l, r);
    const auto got = index.mode(l, r);
    const auto want = oracle_mode(ref, l, r);
    ASSERT_EQ(got.frequency, want.frequency) << l << " " << r;
    ASSERT_TRUE(want.accepts(got.color));
    ASSERT_EQ(index.base().count_value_in_range(got.color, index.base().rank_to_index(l),
                                                index.base().rank_to_index(r)),
              got.frequency);
  }
  EXPECT_TRUE(ScratchGuard::thread_table().clean());
}

INSTANTIATE_TEST_SUITE_P(Alphabets, RangeModeFuzz, ::testing::Values(2, 9, 60, 500, 3000));
