#include "rfq/range_index.hpp"

#include <string>

#include "rfq/edit_ops.hpp"
#include "rfq/mode_query.hpp"

namespace rfq {

RangeFrequencyIndex::RangeFrequencyIndex(Params params)
    : base_(params), least_(base_), interior_(base_) {}

RangeFrequencyIndex::RangeFrequencyIndex(std::span<const ColorId> colors, Params params)
    : RangeFrequencyIndex(params) {
  base_.build(colors);
}

ColorId RangeFrequencyIndex::at(std::size_t rank) const {
  return base_.color_value(base_.color_at(base_.rank_to_index(rank)));
}

void RangeFrequencyIndex::set(std::size_t rank, ColorId color) { base_.apply_set(rank, color); }

void RangeFrequencyIndex::insert(std::size_t rank, ColorId color) {
  insert_element(base_, rank, color);
}

void RangeFrequencyIndex::erase(std::size_t rank) { delete_element(base_, rank); }

bool RangeFrequencyIndex::maybe_rebuild() { return rfq::maybe_rebuild(base_); }

QueryAnswer RangeFrequencyIndex::mode(std::size_t l, std::size_t r) const {
  return range_mode(base_, l, r);
}

QueryAnswer RangeFrequencyIndex::least_frequent_zero(std::size_t l, std::size_t r) const {
  return least_.range_least_frequent_zero(l, r);
}

QueryAnswer RangeFrequencyIndex::least_frequent_present(std::size_t l, std::size_t r) const {
  return interior_.range_least_frequent_present(l, r);
}

QueryAnswer RangeFrequencyIndex::k_frequency(std::size_t l, std::size_t r, std::size_t k) const {
  return interior_.range_k_frequency(l, r, k);
}

std::size_t RangeFrequencyIndex::count_with_frequency(std::size_t l, std::size_t r, std::size_t k,
                                                      Relation relation) const {
  return interior_.count_with_frequency(l, r, k, relation);
}

IndexStats RangeFrequencyIndex::stats() const {
  IndexStats s;
  s.size = base_.live_count();
  s.frozen_size = base_.frozen_size();
  s.block_size = base_.half_width();
  s.threshold = base_.threshold();
  s.segments = base_.segment_count();
  s.colors = base_.registry().size();
  s.frequent_colors = base_.frequent_colors().size();
  s.rebuilds = base_.rebuild_count();
  s.rebuild_moves = base_.rebuild_moves();
  s.table_words = base_.pair_count() * (base_.threshold() + 1) + least_.memory_words() +
                  interior_.histogram_words();
  s.sampler_words = interior_.sampler_words();
  return s;
}

}  // namespace rfq
