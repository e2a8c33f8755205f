#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rfq/base_index.hpp"
#include "rfq/types.hpp"
#include "rfq/xor_sampler.hpp"

namespace rfq {

// Interior histograms and samplers.
//
// For span (j1, j2), an infrequent color is interior when it occurs in the
// span but in neither adjacent segment (j1 - 1 and j2). counts[i] tallies the
// interior colors with i occurrences in the span, and a sampler per (span, i)
// holds exactly those colors so that one can be retrieved.
class KFrequencyIndex final : public MaintenanceHook {
 public:
  explicit KFrequencyIndex(BaseIndex& base);
  KFrequencyIndex(const KFrequencyIndex&) = delete;
  KFrequencyIndex& operator=(const KFrequencyIndex&) = delete;

  void before_color_change(ColorIndex c) override;
  void after_color_change(ColorIndex c) override { refresh_interior(c); }
  void after_rebuild() override;

  // Applies the difference between the contributions recorded by
  // before_color_change and the color's current ones.
  void refresh_interior(ColorIndex c);

  // Per-span in-span counts of c, zero where c is not interior.
  void interior_counts(ColorIndex c, std::vector<std::uint16_t>& out) const;

  std::span<const std::uint32_t> interior_histogram(std::size_t pair) const noexcept {
    return {interior_.data() + pair * (base_.threshold() + 1), base_.threshold() + 1};
  }
  // Null when the cell has never been populated or is empty.
  const Sampler* sampler(std::size_t pair, std::size_t f) const noexcept {
    return samplers_[pair * (base_.threshold() + 1) + f].get();
  }
  const std::shared_ptr<const SketchFamily>& family() const noexcept { return family_; }

  // A color with exactly k occurrences in rank range [l, r]; none when no
  // color has k; sampling_failure when the sampler could not produce one.
  QueryAnswer range_k_frequency(std::size_t l, std::size_t r, std::size_t k) const;
  // Least frequent among colors occurring at least once in [l, r].
  QueryAnswer range_least_frequent_present(std::size_t l, std::size_t r) const;
  // Distinct colors of [l, r] whose count is below / at / above k.
  std::size_t count_with_frequency(std::size_t l, std::size_t r, std::size_t k,
                                   Relation relation) const;

  std::size_t histogram_words() const noexcept { return interior_.size(); }
  std::size_t sampler_words() const noexcept;
  std::size_t sampler_cells() const noexcept;

 private:
  void apply(ColorIndex c, const std::vector<std::uint16_t>& before,
             const std::vector<std::uint16_t>& after);

  const BaseIndex& base_;
  std::shared_ptr<const SketchFamily> family_;
  std::vector<std::uint32_t> interior_;
  std::vector<std::unique_ptr<Sampler>> samplers_;

  std::vector<std::uint16_t> before_;
  std::vector<std::uint16_t> after_;
  std::vector<std::uint8_t> levels_;
  struct CellUpdate {
    std::uint32_t id;
    bool insert;
  };
  std::vector<CellUpdate> pending_;
};

}  // namespace rfq
