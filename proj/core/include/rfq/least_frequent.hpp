#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rfq/base_index.hpp"
#include "rfq/types.hpp"

namespace rfq {

// A span histogram with the contributions of some colors removed.
using ErasedHistogram = std::vector<std::uint32_t>;

struct TightCell {
  std::size_t pair = 0;
  std::size_t frequency = 0;
};

// Tight-span lists: every present infrequent color is filed once, under the
// smallest endpoint-aligned span enclosing all its occurrences and its total
// count. Answers least-frequent queries where the answer may be a color that
// is absent from the range but present elsewhere.
class LeastFrequentIndex final : public MaintenanceHook {
 public:
  explicit LeastFrequentIndex(BaseIndex& base);
  LeastFrequentIndex(const LeastFrequentIndex&) = delete;
  LeastFrequentIndex& operator=(const LeastFrequentIndex&) = delete;

  void before_color_change(ColorIndex c) override { detach(c); }
  void after_color_change(ColorIndex c) override { attach(c); }
  void after_rebuild() override;

  void refresh_tight_span(ColorIndex c);

  std::span<const ColorIndex> cell(std::size_t j1, std::size_t j2, std::size_t f) const;
  std::optional<TightCell> cell_of(ColorIndex c) const;
  std::size_t listed_colors() const noexcept { return listed_; }

  // Histogram of span (j1, j2) without the colors in `erase` (distinct,
  // present, infrequent).
  ErasedHistogram compute_erased(std::size_t j1, std::size_t j2,
                                 std::span<const ColorIndex> erase) const;

  QueryAnswer range_least_frequent_zero(std::size_t l, std::size_t r) const;

  std::size_t memory_words() const noexcept;

 private:
  static constexpr std::uint32_t kDetached = 0xffffffffU;
  struct Location {
    std::uint32_t cell = kDetached;
    std::uint32_t pos = 0;
  };

  void attach(ColorIndex c);
  void detach(ColorIndex c);
  std::size_t cell_id(std::size_t pair, std::size_t f) const noexcept {
    return pair * (base_.threshold() + 1) + f;
  }

  const BaseIndex& base_;
  std::vector<std::vector<ColorIndex>> cells_;
  std::vector<Location> where_;
  std::size_t listed_ = 0;
};

}  // namespace rfq
