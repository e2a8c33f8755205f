#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "rfq/xor_sampler.hpp"

using rfq::RetrieveStatus;
using rfq::Sampler;
using rfq::SketchFamily;

TEST(LevelOf, Deterministic) {
  for (std::uint64_t x = 0; x < 100; ++x) {
    EXPECT_EQ(rfq::level_of(x, 99), rfq::level_of(x, 99));
  }
}

TEST(LevelOf, GeometricLaw) {
  std::size_t one = 0;
  std::size_t four_up = 0;
  const std::size_t trials = 100000;
  for (std::uint64_t x = 0; x < trials; ++x) {
    const unsigned level = rfq::level_of(x, 0x1234);
    ASSERT_GE(level, 1u);
    ASSERT_LE(level, rfq::kMaxLevel);
    if (level == 1) ++one;
    if (level >= 4) ++four_up;
  }
  const double p1 = static_cast<double>(one) / trials;
  const double p4 = static_cast<double>(four_up) / trials;
  EXPECT_NEAR(p1, 0.5, 0.01);
  EXPECT_NEAR(p4, 0.125, 0.01);
}

TEST(SketchFamily, CopiesForBound) {
  EXPECT_EQ(SketchFamily::copies_for(1024, 2), 20u);
  EXPECT_GE(SketchFamily::copies_for(1, 2), 1u);
}

TEST(Sampler, EmptyRetrieve) {
  Sampler s(1024, 2, 1);
  EXPECT_EQ(s.retrieve().status, RetrieveStatus::empty);
}

TEST(Sampler, SingleElement) {
  Sampler s(1024, 2, 1);
  s.insert(5);
  const auto got = s.retrieve();
  ASSERT_EQ(got.status, RetrieveStatus::found);
  EXPECT_EQ(got.value, 5u);
  for (std::size_t copy = 0; copy < s.copies(); ++copy) {
    EXPECT_EQ(s.retrieve_from_copy(copy).value, 5u);
  }
  s.remove(5);
  EXPECT_EQ(s.retrieve().status, RetrieveStatus::empty);
}

TEST(Sampler, LiveCountAndCancellation) {
  Sampler s(1024, 2, 3);
  for (std::uint64_t x = 1; x <= 8; ++x) s.insert(x);
  EXPECT_EQ(s.live_count(), 8u);
  std::vector<unsigned> tops;
  for (std::size_t copy = 0; copy < s.copies(); ++copy) tops.push_back(s.copy_state(copy).max_level);
  for (std::uint64_t x = 1; x <= 8; ++x) s.remove(x);
  EXPECT_EQ(s.live_count(), 0u);
  for (std::size_t copy = 0; copy < s.copies(); ++copy) {
    const auto view = s.copy_state(copy);
    EXPECT_EQ(view.max_level, 0u);
    for (unsigned level = 0; level < tops[copy]; ++level) {
      EXPECT_EQ(view.level(level).mask, 0u);
      EXPECT_EQ(view.level(level).count, 0u);
    }
  }
}

TEST(Sampler, StateDependsOnlyOnLiveSet) {
  auto family = std::make_shared<const SketchFamily>(SketchFamily::copies_for(4096, 2), 77);
  Sampler a(family);
  Sampler b(family);
  for (std::uint64_t x = 0; x < 200; ++x) a.insert(x * 31 + 1);
  for (std::uint64_t x = 0; x < 200; x += 2) a.remove(x * 31 + 1);
  for (std::uint64_t x = 1; x < 200; x += 2) b.insert(x * 31 + 1);
  EXPECT_TRUE(a.same_state(b));
}

TEST(Sampler, PrecomputedLevelsMatch) {
  auto family = std::make_shared<const SketchFamily>(12, 5);
  Sampler a(family);
  Sampler b(family);
  for (std::uint64_t x = 10; x < 60; ++x) {
    a.insert(x);
    b.insert(x, family->levels(x));
  }
  EXPECT_TRUE(a.same_state(b));
}

TEST(Sampler, RetrievedValueIsLive) {
  std::mt19937_64 rng(11);
  Sampler s(1 << 16, 2, 9);
  std::set<std::uint64_t> live;
  for (int op = 0; op < 5000; ++op) {
    if (live.empty() || rng() % 3 != 0) {
      const std::uint64_t x = rng();
      if (live.insert(x).second) s.insert(x);
    } else {
      auto it = live.begin();
      std::advance(it, static_cast<long>(rng() % live.size()));
      s.remove(*it);
      live.erase(it);
    }
    const auto got = s.retrieve();
    if (live.empty()) {
      EXPECT_EQ(got.status, RetrieveStatus::empty);
    } else if (got.status == RetrieveStatus::found) {
      EXPECT_TRUE(live.count(got.value)) << "op " << op;
    }
    ASSERT_EQ(s.live_count(), live.size());
  }
}

TEST(Sampler, FailureRateSmall) {
  std::size_t failures = 0;
  const std::size_t trials = 10000;
  std::mt19937_64 rng(2024);
  for (std::size_t t = 0; t < trials; ++t) {
    Sampler s(1024, 2, rng());
    for (std::uint64_t x = 0; x < 100; ++x) s.insert(rng());
    if (s.retrieve().status == RetrieveStatus::failure) ++failures;
  }
  EXPECT_LE(static_cast<double>(failures) / trials, 1e-3);
}
