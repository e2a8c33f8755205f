#include "rfq/base_index.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rfq {

namespace {

__extension__ typedef unsigned __int128 u128;

std::size_t smallest_cube_at_least(u128 target) noexcept {
  auto t = static_cast<std::size_t>(std::cbrt(static_cast<long double>(target)));
  while (t > 0 && static_cast<u128>(t) * t * t >= target) --t;
  while (static_cast<u128>(t) * t * t < target) ++t;
  return t;
}

}  // namespace

std::size_t ceil_pow_two_thirds(std::size_t n) noexcept {
  return smallest_cube_at_least(static_cast<u128>(n) * n);
}

std::size_t ceil_cbrt(std::size_t n) noexcept { return smallest_cube_at_least(n); }

BaseIndex::BaseIndex(Params params) : params_(params) { build({}); }

void BaseIndex::check_slot(std::size_t index) const {
  if (index >= slots_.size()) {
    throw std::out_of_range("index " + std::to_string(index) + " outside slot space of size " +
                            std::to_string(slots_.size()));
  }
}

ColorIndex BaseIndex::intern(ColorId value) {
  if (auto it = registry_.find(value); it != registry_.end()) return it->second;
  ColorIndex c;
  if (!free_colors_.empty()) {
    c = free_colors_.back();
    free_colors_.pop_back();
  } else {
    c = static_cast<ColorIndex>(states_.size());
    states_.emplace_back();
    totals_.push_back(0);
  }
  states_[c].value = value;
  states_[c].frequent = false;
  registry_.emplace(value, c);
  return c;
}

void BaseIndex::release(ColorIndex c) {
  registry_.erase(states_[c].value);
  states_[c].occurrences = TieredSeq<std::uint32_t>{};
  states_[c].frequent = false;
  totals_[c] = 0;
  free_colors_.push_back(c);
}

std::optional<ColorIndex> BaseIndex::find_color(ColorId value) const {
  if (auto it = registry_.find(value); it != registry_.end()) return it->second;
  return std::nullopt;
}

void BaseIndex::mark_frequent(ColorIndex c) {
  states_[c].frequent = true;
  states_[c].frequent_slot = static_cast<std::uint32_t>(frequent_.size());
  frequent_.push_back(c);
}

void BaseIndex::unmark_frequent(ColorIndex c) {
  const std::uint32_t slot = states_[c].frequent_slot;
  const ColorIndex moved = frequent_.back();
  frequent_[slot] = moved;
  states_[moved].frequent_slot = slot;
  frequent_.pop_back();
  states_[c].frequent = false;
}

void BaseIndex::build(std::span<const ColorId> colors) {
  const std::size_t n = colors.size();
  frozen_ = n;
  delta_ = std::max<std::size_t>(1, params_.block_size.value_or(ceil_pow_two_thirds(n)));
  width_ = 2 * delta_;
  threshold_ = std::max<std::size_t>(1, params_.threshold.value_or(ceil_cbrt(n)));
  segments_ = n == 0 ? 0 : (n + delta_ - 1) / delta_;
  live_ = n;

  registry_.clear();
  states_.clear();
  totals_.clear();
  free_colors_.clear();
  frequent_.clear();
  infrequent_colors_ = 0;

  slots_.assign(segments_ * width_, kNoColor);
  handles_.assign(slots_.size(), ElemHandle{});
  occupancy_.assign(segments_, 0);

  // Spread the elements evenly; each segment starts about half full.
  std::size_t next = 0;
  for (std::size_t s = 0; s < segments_; ++s) {
    const std::size_t take = n / segments_ + (s < n % segments_ ? 1 : 0);
    occupancy_[s] = static_cast<std::uint32_t>(take);
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t idx = s * width_ + k;
      const ColorIndex c = intern(colors[next++]);
      slots_[idx] = c;
      states_[c].occurrences.push_back(static_cast<std::uint32_t>(idx), &handles_[idx]);
      ++totals_[c];
    }
  }

  for (const auto& [value, c] : registry_) {
    if (states_[c].occurrences.size() > threshold_) {
      mark_frequent(c);
    } else {
      ++infrequent_colors_;
    }
  }
  std::sort(frequent_.begin(), frequent_.end());
  for (std::size_t k = 0; k < frequent_.size(); ++k) {
    states_[frequent_[k]].frequent_slot = static_cast<std::uint32_t>(k);
  }

  // Prefix counts of frequent colors at every endpoint, one pass.
  prefix_maps_.assign(segments_ + 1, {});
  std::vector<std::uint32_t> running(states_.size(), 0);
  for (std::size_t j = 0; j <= segments_; ++j) {
    auto& map = prefix_maps_[j];
    for (const ColorIndex c : frequent_) map.emplace_hint(map.end(), c, running[c]);
    if (j == segments_) break;
    for (std::size_t idx = j * width_; idx < (j + 1) * width_; ++idx) {
      if (slots_[idx] != kNoColor) ++running[slots_[idx]];
    }
  }

  // Histograms: one scan per left endpoint with a running histogram.
  const std::size_t row = threshold_ + 1;
  histograms_.assign(pair_count() * row, 0);
  std::vector<std::uint32_t> counts(states_.size(), 0);
  std::vector<std::uint32_t> hist(row, 0);
  std::vector<ColorIndex> touched;
  for (std::size_t j1 = 0; j1 < segments_; ++j1) {
    for (const ColorIndex c : touched) counts[c] = 0;
    touched.clear();
    std::fill(hist.begin(), hist.end(), 0);
    hist[0] = static_cast<std::uint32_t>(infrequent_colors_);
    for (std::size_t s = j1; s < segments_; ++s) {
      for (std::size_t idx = s * width_; idx < (s + 1) * width_; ++idx) {
        const ColorIndex c = slots_[idx];
        if (c == kNoColor || states_[c].frequent) continue;
        const std::uint32_t k = counts[c]++;
        if (k == 0) touched.push_back(c);
        --hist[k];
        ++hist[k + 1];
      }
      std::copy(hist.begin(), hist.end(),
                histograms_.begin() + static_cast<std::ptrdiff_t>(pair_index(j1, s + 1) * row));
    }
  }

  for (MaintenanceHook* hook : hooks_) hook->after_rebuild();
}

void BaseIndex::rebuild() {
  const std::vector<ColorId> seq = live_colors();
  ++rebuilds_;
  rebuild_moves_ += seq.size();
  build(seq);
}

std::size_t BaseIndex::rank_to_index(std::size_t rank) const {
  if (rank >= live_) {
    throw std::out_of_range("rank " + std::to_string(rank) + " out of range (size " +
                            std::to_string(live_) + ")");
  }
  std::size_t s = 0;
  while (rank >= occupancy_[s]) rank -= occupancy_[s++];
  return s * width_ + rank;
}

std::size_t BaseIndex::index_to_rank(std::size_t index) const {
  check_slot(index);
  if (slots_[index] == kNoColor) throw std::invalid_argument("index_to_rank: slot is empty");
  const std::size_t s = segment_of(index);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < s; ++k) rank += occupancy_[k];
  return rank + index - s * width_;
}

std::vector<ColorId> BaseIndex::live_colors() const {
  std::vector<ColorId> out;
  out.reserve(live_);
  for (const ColorIndex c : slots_) {
    if (c != kNoColor) out.push_back(states_[c].value);
  }
  return out;
}

std::uint32_t BaseIndex::prefix_count(std::size_t j, ColorIndex c) const {
  const auto& map = prefix_maps_[j];
  auto it = map.find(c);
  return it == map.end() ? 0 : it->second;
}

std::size_t BaseIndex::frequent_span_count(ColorIndex c, std::size_t j1, std::size_t j2) const {
  assert(states_[c].frequent && j1 <= j2);
  return prefix_count(j2, c) - prefix_count(j1, c);
}

FrequencyAnswer BaseIndex::frequency_test(std::size_t i, std::size_t bound, std::size_t f,
                                          Side side) const {
  const auto& occ = states_[slots_[i]].occurrences;
  const std::size_t r = occ.rank_of(handles_[i]);
  const std::size_t len = occ.size();
  FrequencyAnswer ans;
  if (side == Side::right) {
    ans.at_least = f == 0 || (r + f - 1 < len && occ[r + f - 1] <= bound);
    ans.at_most = r + f >= len || occ[r + f] > bound;
  } else {
    ans.at_least = f == 0 || (r + 1 >= f && occ[r + 1 - f] >= bound);
    ans.at_most = r < f || occ[r - f] < bound;
  }
  ans.exactly = ans.at_least && ans.at_most;
  return ans;
}

std::size_t BaseIndex::count_in_range(ColorIndex c, std::size_t lo, std::size_t hi) const {
  if (lo > hi) return 0;
  const auto& occ = states_[c].occurrences;
  const auto key_lo = static_cast<std::uint32_t>(lo);
  const auto key_hi = static_cast<std::uint32_t>(std::min<std::size_t>(hi, 0xfffffffeU) + 1);
  return occ.lower_bound(key_hi) - occ.lower_bound(key_lo);
}

std::size_t BaseIndex::count_value_in_range(ColorId value, std::size_t lo, std::size_t hi) const {
  const auto c = find_color(value);
  return c ? count_in_range(*c, lo, hi) : 0;
}

void BaseIndex::occurrence_prefix(ColorIndex c, std::vector<std::uint32_t>& out) const {
  out.assign(segments_ + 1, 0);
  const auto& occ = states_[c].occurrences;
  for (std::size_t r = 0; r < occ.size(); ++r) ++out[occ[r] / width_ + 1];
  for (std::size_t j = 1; j <= segments_; ++j) out[j] += out[j - 1];
}

void BaseIndex::decrement(std::uint32_t& cell) {
  if (params_.fault_skip_histogram_decrement != 0 &&
      ++decrements_ == params_.fault_skip_histogram_decrement) {
    return;
  }
  --cell;
}

void BaseIndex::update_histograms(const std::vector<std::uint32_t>* before,
                                  const std::vector<std::uint32_t>* after) {
  if (before == nullptr && after == nullptr) return;
  const std::size_t row = threshold_ + 1;
  std::size_t pair = 0;
  for (std::size_t j1 = 0; j1 < segments_; ++j1) {
    for (std::size_t j2 = j1 + 1; j2 <= segments_; ++j2, ++pair) {
      const long old_f = before ? static_cast<long>((*before)[j2] - (*before)[j1]) : -1;
      const long new_f = after ? static_cast<long>((*after)[j2] - (*after)[j1]) : -1;
      if (old_f == new_f) continue;
      std::uint32_t* cells = histograms_.data() + pair * row;
      if (old_f >= 0) decrement(cells[old_f]);
      if (new_f >= 0) ++cells[new_f];
    }
  }
}

void BaseIndex::add_occurrence(std::size_t index, ColorId value) {
  check_slot(index);
  if (slots_[index] != kNoColor) throw std::logic_error("add_occurrence: slot is occupied");

  const ColorIndex c = intern(value);
  const std::size_t old_total = states_[c].occurrences.size();
  const bool was_infrequent = old_total >= 1 && old_total <= threshold_;

  for (MaintenanceHook* hook : hooks_) hook->before_color_change(c);
  if (was_infrequent) occurrence_prefix(c, before_prefix_);

  auto& occ = states_[c].occurrences;
  const auto key = static_cast<std::uint32_t>(index);
  occ.insert(occ.lower_bound(key), key, &handles_[index]);
  ++totals_[c];
  slots_[index] = c;
  ++occupancy_[segment_of(index)];
  ++live_;

  const std::size_t new_total = old_total + 1;
  const bool now_infrequent = new_total <= threshold_;
  if (now_infrequent) occurrence_prefix(c, after_prefix_);
  update_histograms(was_infrequent ? &before_prefix_ : nullptr,
                    now_infrequent ? &after_prefix_ : nullptr);

  if (now_infrequent) {
    if (!was_infrequent) ++infrequent_colors_;
  } else if (old_total > threshold_) {
    for (std::size_t j = segment_of(index) + 1; j <= segments_; ++j) ++prefix_maps_[j][c];
  } else {
    // Crossed the threshold: leaves the histograms, enters every prefix map.
    if (was_infrequent) --infrequent_colors_;
    mark_frequent(c);
    occurrence_prefix(c, after_prefix_);
    for (std::size_t j = 0; j <= segments_; ++j) prefix_maps_[j][c] = after_prefix_[j];
  }

  for (MaintenanceHook* hook : hooks_) hook->after_color_change(c);
}

void BaseIndex::remove_occurrence(std::size_t index) {
  check_slot(index);
  if (slots_[index] == kNoColor) throw std::logic_error("remove_occurrence: slot is empty");

  const ColorIndex c = slots_[index];
  const std::size_t old_total = states_[c].occurrences.size();
  const bool was_infrequent = old_total <= threshold_;

  for (MaintenanceHook* hook : hooks_) hook->before_color_change(c);
  if (was_infrequent) occurrence_prefix(c, before_prefix_);

  auto& occ = states_[c].occurrences;
  occ.erase(occ.rank_of(handles_[index]));
  --totals_[c];
  slots_[index] = kNoColor;
  handles_[index] = ElemHandle{};
  --occupancy_[segment_of(index)];
  --live_;

  const std::size_t new_total = old_total - 1;
  const bool now_infrequent = new_total >= 1 && new_total <= threshold_;
  if (now_infrequent) occurrence_prefix(c, after_prefix_);
  update_histograms(was_infrequent ? &before_prefix_ : nullptr,
                    now_infrequent ? &after_prefix_ : nullptr);

  if (was_infrequent) {
    if (!now_infrequent) --infrequent_colors_;
  } else if (new_total > threshold_) {
    for (std::size_t j = segment_of(index) + 1; j <= segments_; ++j) --prefix_maps_[j][c];
  } else {
    for (auto& map : prefix_maps_) map.erase(c);
    unmark_frequent(c);
    ++infrequent_colors_;
  }

  for (MaintenanceHook* hook : hooks_) hook->after_color_change(c);
  if (new_total == 0) release(c);
}

void BaseIndex::apply_set(std::size_t rank, ColorId value) {
  const std::size_t index = rank_to_index(rank);
  if (states_[slots_[index]].value == value) return;
  remove_occurrence(index);
  add_occurrence(index, value);
}

void BaseIndex::move_element(std::size_t from, std::size_t to) {
  assert(slots_[from] != kNoColor && slots_[to] == kNoColor);
  assert(segment_of(from) == segment_of(to));
  const ColorIndex c = slots_[from];
  auto& occ = states_[c].occurrences;
  const ElemHandle h = handles_[from];
  occ.set_at_handle(h, static_cast<std::uint32_t>(to));
  occ.rebind(h, &handles_[to]);
  slots_[to] = c;
  slots_[from] = kNoColor;
  handles_[from] = ElemHandle{};
}

}  // namespace rfq
