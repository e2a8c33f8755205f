#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rfq/tiered_seq.hpp"

using rfq::ElemHandle;
using rfq::TieredSeq;

namespace {

template <typename T>
void expect_equal(const TieredSeq<T>& seq, const std::vector<T>& flat) {
  ASSERT_EQ(seq.size(), flat.size());
  EXPECT_EQ(seq.to_vector(), flat);
}

}  // namespace

TEST(TieredSeq, SingletonGet) {
  TieredSeq<int> seq;
  seq.push_back(7);
  EXPECT_EQ(seq.get(0), 7);
  EXPECT_THROW(seq.get(1), std::out_of_range);
}

TEST(TieredSeq, AppendWithFixedBlock) {
  auto seq = TieredSeq<int>::with_block_size(10);
  std::vector<int> flat;
  for (int i = 0; i < 100; ++i) {
    seq.push_back(i);
    flat.push_back(i);
  }
  EXPECT_EQ(seq.get(37), 37);
  EXPECT_EQ(seq.block_size(), 10u);
  EXPECT_EQ(seq.queue_count(), 10u);
  expect_equal(seq, flat);
}

TEST(TieredSeq, SetAndBounds) {
  TieredSeq<int> seq;
  seq.push_back(5);
  seq.set(0, 9);
  EXPECT_EQ(seq.get(0), 9);
  EXPECT_THROW(seq.set(1, 3), std::out_of_range);
}

TEST(TieredSeq, InsertIntoEmptyAndMiddle) {
  TieredSeq<int> seq;
  const ElemHandle h = seq.insert(0, 4);
  EXPECT_EQ(seq.get(0), 4);
  EXPECT_EQ(seq.rank_of(h), 0u);

  TieredSeq<int> abc;
  for (int v : {1, 2, 3}) abc.push_back(v);
  abc.insert(1, 9);
  expect_equal(abc, {1, 9, 2, 3});
  abc.erase(1);
  expect_equal(abc, {1, 2, 3});
  EXPECT_THROW(abc.insert(5, 0), std::out_of_range);
  EXPECT_THROW(abc.erase(3), std::out_of_range);
}

TEST(TieredSeq, DeleteToEmpty) {
  TieredSeq<int> seq;
  seq.push_back(4);
  seq.erase(0);
  EXPECT_TRUE(seq.empty());
  seq.push_back(2);
  EXPECT_EQ(seq.get(0), 2);
}

TEST(TieredSeq, HandleRankAfterInsert) {
  TieredSeq<int> seq;
  for (int i = 0; i < 19; ++i) seq.push_back(i);
  const ElemHandle h = seq.insert(5, 100);
  EXPECT_EQ(seq.rank_of(h), 5u);
  EXPECT_EQ(seq.at_handle(h), 100);
}

TEST(TieredSeq, LowerBound) {
  TieredSeq<int> seq;
  for (int v : {2, 5, 9}) seq.push_back(v);
  EXPECT_EQ(seq.lower_bound(5), 1u);
  EXPECT_EQ(seq.lower_bound(10), 3u);
  EXPECT_EQ(seq.lower_bound(0), 0u);
}

TEST(TieredSeq, ZeroBlockSizeRejected) {
  EXPECT_THROW(TieredSeq<int>::with_block_size(0), std::invalid_argument);
}

// Every element carries a back-pointer; after each op the pointer must name
// the slot that holds the element.
TEST(TieredSeq, FuzzAgainstFlatListWithHandles) {
  std::mt19937_64 rng(42);
  TieredSeq<int> seq;
  std::vector<int> flat;
  std::vector<ElemHandle> handles(20000);
  std::vector<int> free_ids;
  for (int i = 19999; i >= 0; --i) free_ids.push_back(i);

  for (int op = 0; op < 20000; ++op) {
    const unsigned kind = rng() % 10;
    if (flat.empty() || kind < 5) {
      const std::size_t rank = rng() % (flat.size() + 1);
      const int id = free_ids.back();
      free_ids.pop_back();
      seq.insert(rank, id, &handles[id]);
      flat.insert(flat.begin() + static_cast<long>(rank), id);
    } else if (kind < 8) {
      const std::size_t rank = rng() % flat.size();
      free_ids.push_back(flat[rank]);
      seq.erase(rank);
      flat.erase(flat.begin() + static_cast<long>(rank));
    } else {
      const std::size_t rank = rng() % flat.size();
      EXPECT_EQ(seq.get(rank), flat[rank]);
      EXPECT_EQ(seq.rank_of(seq.handle_of(rank)), rank);
    }
    if (op % 97 == 0) {
      expect_equal(seq, flat);
      for (std::size_t r = 0; r < flat.size(); ++r) {
        ASSERT_EQ(seq.rank_of(handles[flat[r]]), r) << "op " << op;
      }
    }
  }
  expect_equal(seq, flat);
}

TEST(TieredSeq, MovesPerOpScaleWithSqrtN) {
  std::mt19937_64 rng(7);
  TieredSeq<int> seq;
  const std::size_t n = 16384;
  for (std::size_t i = 0; i < n; ++i) seq.push_back(static_cast<int>(i));
  const auto before = seq.moves();
  const std::size_t ops = 4000;
  for (std::size_t op = 0; op < ops; ++op) {
    if (op % 2 == 0) {
      seq.insert(rng() % (seq.size() + 1), 0);
    } else {
      seq.erase(rng() % seq.size());
    }
  }
  const double per_op = static_cast<double>(seq.moves() - before) / ops;
  EXPECT_LE(per_op, 4.0 * std::sqrt(static_cast<double>(n)));
}
