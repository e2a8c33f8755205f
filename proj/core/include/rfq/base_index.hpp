#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rfq/tiered_seq.hpp"
#include "rfq/types.hpp"

namespace rfq {

// Answers to "does the color at i occur at least / at most / exactly f times
// between i and bound".
struct FrequencyAnswer {
  bool at_least = false;
  bool at_most = false;
  bool exactly = false;
};

// Observer for structures layered on the base index. before_color_change
// sees the color's state prior to an occurrence being added or removed,
// after_color_change the consistent state afterwards. A color that is absent
// (total count zero) is reported with an empty occurrence list.
class MaintenanceHook {
 public:
  virtual ~MaintenanceHook() = default;
  virtual void before_color_change(ColorIndex c) = 0;
  virtual void after_color_change(ColorIndex c) = 0;
  virtual void after_rebuild() = 0;
};

// The segmented array and its frequency summaries.
//
// Internal indices address slots, including empty ones; ranks count live
// slots only. The live slots of each segment form a prefix of it; the
// single-slot mutators below may break that only transiently, and rank
// conversions assume it. Segments are 2 * half_width slots wide, endpoint j
// sits at internal index j * width, and span (j1, j2) is the half-open index
// range [j1 * width, j2 * width).
//
// Per span, the histogram holds for every f in [0, threshold] the number of
// infrequent colors (total count <= threshold) that occur exactly f times in it.
// Frequent colors are tracked by prefix counts at every endpoint instead.
class BaseIndex {
 public:
  explicit BaseIndex(Params params = {});
  BaseIndex(const BaseIndex&) = delete;
  BaseIndex& operator=(const BaseIndex&) = delete;

  void build(std::span<const ColorId> colors);
  // Rebuilds from the live sequence with freshly derived size, half width and threshold.
  void rebuild();
  void add_hook(MaintenanceHook* hook) { hooks_.push_back(hook); }

  const Params& params() const noexcept { return params_; }
  std::size_t live_count() const noexcept { return live_; }
  std::size_t frozen_size() const noexcept { return frozen_; }
  std::size_t half_width() const noexcept { return delta_; }
  std::size_t segment_width() const noexcept { return width_; }
  std::size_t threshold() const noexcept { return threshold_; }
  std::size_t segment_count() const noexcept { return segments_; }
  std::size_t endpoint_count() const noexcept { return segments_ + 1; }
  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::size_t pair_count() const noexcept { return segments_ * (segments_ + 1) / 2; }
  std::size_t pair_index(std::size_t j1, std::size_t j2) const noexcept {
    return j1 * (segments_ + 1) - j1 * (j1 + 1) / 2 + (j2 - j1 - 1);
  }
  std::size_t segment_of(std::size_t index) const noexcept { return index / width_; }
  std::size_t segment_occupancy(std::size_t s) const noexcept { return occupancy_[s]; }

  bool is_live(std::size_t index) const noexcept { return slots_[index] != kNoColor; }
  ColorIndex color_at(std::size_t index) const noexcept { return slots_[index]; }
  ElemHandle handle_at(std::size_t index) const noexcept { return handles_[index]; }
  ColorId color_value(ColorIndex c) const noexcept { return states_[c].value; }

  std::size_t rank_to_index(std::size_t rank) const;
  std::size_t index_to_rank(std::size_t index) const;
  std::vector<ColorId> live_colors() const;

  const std::map<ColorId, ColorIndex>& registry() const noexcept { return registry_; }
  std::optional<ColorIndex> find_color(ColorId value) const;
  // Upper bound on ColorIndex values currently in use.
  std::size_t color_capacity() const noexcept { return states_.size(); }
  std::size_t total_count(ColorIndex c) const noexcept { return totals_[c]; }
  bool is_present(ColorIndex c) const noexcept {
    return c < totals_.size() && totals_[c] != 0;
  }
  bool is_frequent(ColorIndex c) const noexcept { return states_[c].frequent; }
  bool is_infrequent_present(ColorIndex c) const noexcept {
    const std::size_t n = total_count(c);
    return n >= 1 && n <= threshold_;
  }
  const TieredSeq<std::uint32_t>& occurrences(ColorIndex c) const noexcept {
    return states_[c].occurrences;
  }
  std::span<const ColorIndex> frequent_colors() const noexcept { return frequent_; }
  std::size_t infrequent_color_count() const noexcept { return infrequent_colors_; }

  // Histogram of span (j1, j2), entries 0..threshold.
  std::span<const std::uint32_t> histogram(std::size_t j1, std::size_t j2) const noexcept {
    return histogram_row(pair_index(j1, j2));
  }
  std::span<const std::uint32_t> histogram_row(std::size_t pair) const noexcept {
    return {histograms_.data() + pair * (threshold_ + 1), threshold_ + 1};
  }

  // Occurrences of frequent color c in [0, j * width).
  std::uint32_t prefix_count(std::size_t j, ColorIndex c) const;
  const std::map<ColorIndex, std::uint32_t>& frequent_prefix(std::size_t j) const noexcept {
    return prefix_maps_[j];
  }
  std::size_t frequent_span_count(ColorIndex c, std::size_t j1, std::size_t j2) const;

  // With c = color at live slot i, compares the occurrences of c in [i, bound]
  // (side right) or [bound, i] (side left) against f, in O(1).
  FrequencyAnswer frequency_test(std::size_t i, std::size_t bound, std::size_t f, Side side) const;

  // Occurrences of c in the inclusive internal index range [lo, hi].
  std::size_t count_in_range(ColorIndex c, std::size_t lo, std::size_t hi) const;
  std::size_t count_value_in_range(ColorId value, std::size_t lo, std::size_t hi) const;

  // Occurrence counts of c at every endpoint: out[j] = occurrences in [0, j * width).
  void occurrence_prefix(ColorIndex c, std::vector<std::uint32_t>& out) const;

  void add_occurrence(std::size_t index, ColorId value);
  void remove_occurrence(std::size_t index);
  void apply_set(std::size_t rank, ColorId value);
  // Relocates a live slot to an adjacent empty slot of the same segment.
  void move_element(std::size_t from, std::size_t to);

  std::uint64_t rebuild_count() const noexcept { return rebuilds_; }
  std::uint64_t rebuild_moves() const noexcept { return rebuild_moves_; }

 private:
  struct ColorState {
    ColorId value = 0;
    TieredSeq<std::uint32_t> occurrences;
    bool frequent = false;
    std::uint32_t frequent_slot = 0;
  };

  ColorIndex intern(ColorId value);
  void release(ColorIndex c);
  void mark_frequent(ColorIndex c);
  void unmark_frequent(ColorIndex c);
  void update_histograms(const std::vector<std::uint32_t>* before,
                         const std::vector<std::uint32_t>* after);
  void decrement(std::uint32_t& cell);
  void check_slot(std::size_t index) const;

  Params params_;
  std::vector<MaintenanceHook*> hooks_;

  std::size_t frozen_ = 0;
  std::size_t delta_ = 1;
  std::size_t width_ = 2;
  std::size_t threshold_ = 1;
  std::size_t segments_ = 0;
  std::size_t live_ = 0;

  std::vector<ColorIndex> slots_;
  std::vector<ElemHandle> handles_;
  std::vector<std::uint32_t> occupancy_;

  std::map<ColorId, ColorIndex> registry_;
  std::vector<ColorState> states_;
  // Occurrence counts by color, kept apart from states_ for locality.
  std::vector<std::uint32_t> totals_;
  std::vector<ColorIndex> free_colors_;
  std::vector<ColorIndex> frequent_;
  std::size_t infrequent_colors_ = 0;

  std::vector<std::uint32_t> histograms_;
  std::vector<std::map<ColorIndex, std::uint32_t>> prefix_maps_;

  std::vector<std::uint32_t> before_prefix_;
  std::vector<std::uint32_t> after_prefix_;

  std::uint64_t rebuilds_ = 0;
  std::uint64_t rebuild_moves_ = 0;
  std::uint64_t decrements_ = 0;
};

// Smallest d with d^3 >= n^2, and smallest t with t^3 >= n.
std::size_t ceil_pow_two_thirds(std::size_t n) noexcept;
std::size_t ceil_cbrt(std::size_t n) noexcept;

}  // namespace rfq
