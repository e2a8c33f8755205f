#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfq/base_index.hpp"
#include "rfq/k_frequency.hpp"
#include "rfq/least_frequent.hpp"
#include "rfq/types.hpp"

namespace rfq {

struct IndexStats {
  std::size_t size = 0;
  std::size_t frozen_size = 0;
  std::size_t block_size = 0;
  std::size_t threshold = 0;
  std::size_t segments = 0;
  std::size_t colors = 0;
  std::size_t frequent_colors = 0;
  std::uint64_t rebuilds = 0;
  std::uint64_t rebuild_moves = 0;
  // Words of the span histograms, tight-span lists and interior histograms.
  std::size_t table_words = 0;
  std::size_t sampler_words = 0;
};

// Dynamic array of colors answering range frequency queries. Positions are
// ranks: 0 .. size() - 1 over the current sequence.
class RangeFrequencyIndex {
 public:
  explicit RangeFrequencyIndex(Params params = {});
  explicit RangeFrequencyIndex(std::span<const ColorId> colors, Params params = {});
  RangeFrequencyIndex(const RangeFrequencyIndex&) = delete;
  RangeFrequencyIndex& operator=(const RangeFrequencyIndex&) = delete;

  std::size_t size() const noexcept { return base_.live_count(); }
  ColorId at(std::size_t rank) const;
  std::vector<ColorId> to_vector() const { return base_.live_colors(); }

  void assign(std::span<const ColorId> colors) { base_.build(colors); }
  void set(std::size_t rank, ColorId color);
  void insert(std::size_t rank, ColorId color);
  void erase(std::size_t rank);
  void rebuild() { base_.rebuild(); }
  bool maybe_rebuild();

  QueryAnswer mode(std::size_t l, std::size_t r) const;
  // Least frequent color of the whole array within [l, r]; may have count 0.
  QueryAnswer least_frequent_zero(std::size_t l, std::size_t r) const;
  // Least frequent among the colors that occur in [l, r].
  QueryAnswer least_frequent_present(std::size_t l, std::size_t r) const;
  QueryAnswer k_frequency(std::size_t l, std::size_t r, std::size_t k) const;
  std::size_t count_with_frequency(std::size_t l, std::size_t r, std::size_t k,
                                   Relation relation) const;

  IndexStats stats() const;

  const BaseIndex& base() const noexcept { return base_; }
  const LeastFrequentIndex& tight_spans() const noexcept { return least_; }
  const KFrequencyIndex& interior() const noexcept { return interior_; }

 private:
  BaseIndex base_;
  LeastFrequentIndex least_;
  KFrequencyIndex interior_;
};

}  // namespace rfq
