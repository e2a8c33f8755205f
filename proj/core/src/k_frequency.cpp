#include "rfq/k_frequency.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "rfq/scratch.hpp"
#include "rfq/window.hpp"

namespace rfq {

KFrequencyIndex::KFrequencyIndex(BaseIndex& base) : base_(base) {
  base.add_hook(this);
  after_rebuild();
}

void KFrequencyIndex::interior_counts(ColorIndex c, std::vector<std::uint16_t>& out) const {
  out.assign(base_.pair_count(), 0);
  if (!base_.is_infrequent_present(c)) return;
  std::vector<std::uint32_t> prefix;
  base_.occurrence_prefix(c, prefix);
  const std::size_t segs = base_.segment_count();
  auto in_segment = [&](std::size_t s) { return prefix[s + 1] - prefix[s]; };
  const auto& occ = base_.occurrences(c);
  const std::size_t first = base_.segment_of(occ[0]);
  const std::size_t last = base_.segment_of(occ[occ.size() - 1]);
  for (std::size_t j1 = 0; j1 <= last; ++j1) {
    if (j1 > 0 && in_segment(j1 - 1) != 0) continue;
    for (std::size_t j2 = std::max(j1, first) + 1; j2 <= segs; ++j2) {
      if (j2 < segs && in_segment(j2) != 0) continue;
      out[base_.pair_index(j1, j2)] = static_cast<std::uint16_t>(prefix[j2] - prefix[j1]);
    }
  }
}

void KFrequencyIndex::before_color_change(ColorIndex c) { interior_counts(c, before_); }

void KFrequencyIndex::refresh_interior(ColorIndex c) {
  interior_counts(c, after_);
  apply(c, before_, after_);
}

void KFrequencyIndex::apply(ColorIndex c, const std::vector<std::uint16_t>& before,
                            const std::vector<std::uint16_t>& after) {
  const std::size_t row = base_.threshold() + 1;
  pending_.clear();
  for (std::size_t p = 0; p < after.size(); ++p) {
    const std::size_t old_f = before[p];
    const std::size_t new_f = after[p];
    if (old_f == new_f) continue;
    if (old_f != 0) {
      const std::size_t id = p * row + old_f;
      --interior_[id];
      pending_.push_back({static_cast<std::uint32_t>(id), false});
    }
    if (new_f != 0) {
      const std::size_t id = p * row + new_f;
      ++interior_[id];
      if (!samplers_[id]) samplers_[id] = std::make_unique<Sampler>(family_);
      pending_.push_back({static_cast<std::uint32_t>(id), true});
    }
  }
  if (pending_.empty()) return;

  const ColorId value = base_.color_value(c);
  levels_.resize(family_->copies());
  family_->levels(value, levels_);
  // The samplers are scattered over the heap; fetch a few updates ahead.
  constexpr std::size_t ahead = 8;
  const std::size_t m = pending_.size();
  for (std::size_t i = 0; i < std::min(m, ahead); ++i) samplers_[pending_[i].id]->prefetch(levels_);
  for (std::size_t i = 0; i < m; ++i) {
    if (i + 2 * ahead < m) __builtin_prefetch(samplers_[pending_[i + 2 * ahead].id].get());
    if (i + ahead < m) samplers_[pending_[i + ahead].id]->prefetch(levels_);
    auto& sampler = samplers_[pending_[i].id];
    if (pending_[i].insert) {
      sampler->insert(value, levels_);
    } else {
      sampler->remove(value, levels_);
      if (sampler->live_count() == 0) sampler.reset();
    }
  }
}

void KFrequencyIndex::after_rebuild() {
  const Params& params = base_.params();
  const std::size_t n_bound = std::max<std::size_t>(2, base_.frozen_size());
  family_ = std::make_shared<const SketchFamily>(
      SketchFamily::copies_for(n_bound, params.sampler_c), params.seed);
  const std::size_t row = base_.threshold() + 1;
  const std::size_t segs = base_.segment_count();
  interior_.assign(base_.pair_count() * row, 0);
  samplers_.clear();
  samplers_.resize(interior_.size());
  before_.assign(base_.pair_count(), 0);

  // Span by span, so that the samplers being filled stay in cache.
  std::vector<ColorId> values;
  std::vector<std::vector<std::uint32_t>> prefix;
  std::vector<std::uint8_t> levels;
  const std::size_t copies = family_->copies();
  for (const auto& [value, c] : base_.registry()) {
    if (!base_.is_infrequent_present(c)) continue;
    values.push_back(value);
    prefix.emplace_back();
    base_.occurrence_prefix(c, prefix.back());
    levels.resize(levels.size() + copies);
    family_->levels(value, std::span(levels).last(copies));
  }
  for (std::size_t j1 = 0; j1 < segs; ++j1) {
    for (std::size_t j2 = j1 + 1; j2 <= segs; ++j2) {
      const std::size_t cell0 = base_.pair_index(j1, j2) * row;
      for (std::size_t k = 0; k < values.size(); ++k) {
        const auto& p = prefix[k];
        const std::size_t f = p[j2] - p[j1];
        if (f == 0 || (j1 > 0 && p[j1] != p[j1 - 1]) || (j2 < segs && p[j2 + 1] != p[j2])) continue;
        ++interior_[cell0 + f];
        auto& sampler = samplers_[cell0 + f];
        if (!sampler) sampler = std::make_unique<Sampler>(family_);
        sampler->insert(values[k], std::span(levels).subspan(k * copies, copies));
      }
    }
  }
}

std::size_t KFrequencyIndex::sampler_words() const noexcept {
  std::size_t words = samplers_.size();
  for (const auto& s : samplers_) {
    if (s) words += s->memory_words();
  }
  return words;
}

std::size_t KFrequencyIndex::sampler_cells() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samplers_.begin(), samplers_.end(), [](const auto& s) { return s != nullptr; }));
}

namespace {

// Scans the segments adjacent to the span; `visit` sees each element of
// segment left_end - 1, then of segment right_end, with the side it is on.
template <typename Visit>
void for_each_adjacent(const BaseIndex& base, const QueryWindow& w, Visit&& visit) {
  const std::size_t width = base.segment_width();
  if (w.left_end > 0) {
    for (std::size_t idx = (w.left_end - 1) * width; idx < w.left_end * width; ++idx) {
      if (base.is_live(idx)) visit(idx, Side::left);
    }
  }
  if (w.right_end < base.segment_count()) {
    for (std::size_t idx = w.right_end * width; idx < (w.right_end + 1) * width; ++idx) {
      if (base.is_live(idx)) visit(idx, Side::right);
    }
  }
}

void scan_counts(const BaseIndex& base, const QueryWindow& w, ScratchCounter& counts) {
  for (std::size_t idx = w.lo; idx <= w.hi; ++idx) {
    if (base.is_live(idx)) counts.bump(base.color_at(idx));
  }
}

bool matches(Relation rel, std::size_t f, std::size_t k) {
  switch (rel) {
    case Relation::below:
      return f < k;
    case Relation::at:
      return f == k;
    case Relation::above:
      return f > k;
  }
  return false;
}

}  // namespace

QueryAnswer KFrequencyIndex::range_k_frequency(std::size_t l, std::size_t r, std::size_t k) const {
  if (k == 0) {
    throw std::invalid_argument("k-frequency needs k >= 1; use the least-frequent query for zero");
  }
  const QueryWindow w = make_window(base_, l, r);
  ScratchGuard seen(base_.color_capacity());
  if (!w.has_span()) {
    scan_counts(base_, w, *seen);
    for (const ColorIndex c : seen->touched()) {
      if (seen->get(c) == k) return QueryAnswer::hit(base_.color_value(c), k);
    }
    return QueryAnswer::miss();
  }

  // Colors of the adjacent segments: test each from its first (left) or
  // last (right) occurrence inside [lo, hi].
  ColorIndex found = kNoColor;
  for_each_adjacent(base_, w, [&](std::size_t idx, Side side) {
    const ColorIndex c = base_.color_at(idx);
    seen->bump(c);
    if (found != kNoColor) return;
    const auto& occ = base_.occurrences(c);
    const std::size_t len = occ.size();
    const std::size_t pos = occ.rank_of(base_.handle_at(idx));
    if (side == Side::left) {
      std::size_t start;
      if (idx >= w.lo) {
        if (pos != 0 && occ[pos - 1] >= w.lo) return;
        start = pos;
      } else {
        if (pos + 1 >= len || occ[pos + 1] < w.lo || occ[pos + 1] > w.hi) return;
        start = pos + 1;
      }
      if (start + k - 1 < len && occ[start + k - 1] <= w.hi &&
          (start + k >= len || occ[start + k] > w.hi)) {
        found = c;
      }
    } else {
      std::size_t end;
      if (idx <= w.hi) {
        if (pos + 1 < len && occ[pos + 1] <= w.hi) return;
        end = pos;
      } else {
        if (pos == 0 || occ[pos - 1] > w.hi || occ[pos - 1] < w.lo) return;
        end = pos - 1;
      }
      if (end + 1 >= k && occ[end + 1 - k] >= w.lo && (end < k || occ[end - k] < w.lo)) found = c;
    }
  });
  if (found != kNoColor) return QueryAnswer::hit(base_.color_value(found), k);

  // Frequent colors absent from both adjacent segments lie wholly in the span.
  const auto& at_left = base_.frequent_prefix(w.left_end);
  const auto& at_right = base_.frequent_prefix(w.right_end);
  for (auto il = at_left.begin(), ir = at_right.begin(); ir != at_right.end(); ++il, ++ir) {
    if (seen->get(ir->first) == 0 && ir->second - il->second == k) {
      return QueryAnswer::hit(base_.color_value(ir->first), k);
    }
  }

  if (k > base_.threshold()) return QueryAnswer::miss();
  const std::size_t pair = base_.pair_index(w.left_end, w.right_end);
  if (interior_histogram(pair)[k] == 0) return QueryAnswer::miss();
  const RetrieveResult got = sampler(pair, k)->retrieve();
  if (got.status == RetrieveStatus::found) return QueryAnswer::hit(got.value, k);
  return QueryAnswer::sampling_failed(k);
}

QueryAnswer KFrequencyIndex::range_least_frequent_present(std::size_t l, std::size_t r) const {
  const QueryWindow w = make_window(base_, l, r);
  ScratchGuard seen(base_.color_capacity());
  std::size_t best_f = std::numeric_limits<std::size_t>::max();
  ColorIndex best = kNoColor;
  auto offer = [&](ColorIndex c, std::size_t f) {
    if (f >= 1 && f < best_f) {
      best_f = f;
      best = c;
    }
  };

  if (!w.has_span()) {
    scan_counts(base_, w, *seen);
    for (const ColorIndex c : seen->touched()) offer(c, seen->get(c));
    return QueryAnswer::hit(base_.color_value(best), best_f);
  }

  for_each_adjacent(base_, w, [&](std::size_t idx, Side) {
    const ColorIndex c = base_.color_at(idx);
    if (seen->bump(c) == 0) offer(c, base_.count_in_range(c, w.lo, w.hi));
  });
  const auto& at_left = base_.frequent_prefix(w.left_end);
  const auto& at_right = base_.frequent_prefix(w.right_end);
  for (auto il = at_left.begin(), ir = at_right.begin(); ir != at_right.end(); ++il, ++ir) {
    if (seen->get(ir->first) == 0) offer(ir->first, ir->second - il->second);
  }

  const std::size_t pair = base_.pair_index(w.left_end, w.right_end);
  const auto hist = interior_histogram(pair);
  std::size_t f = 1;
  while (f < hist.size() && hist[f] == 0) ++f;
  if (f < hist.size() && f < best_f) {
    const RetrieveResult got = sampler(pair, f)->retrieve();
    if (got.status == RetrieveStatus::found) return QueryAnswer::hit(got.value, f);
    return QueryAnswer::sampling_failed(f);
  }
  return QueryAnswer::hit(base_.color_value(best), best_f);
}

std::size_t KFrequencyIndex::count_with_frequency(std::size_t l, std::size_t r, std::size_t k,
                                                  Relation relation) const {
  if (k == 0) throw std::invalid_argument("count_with_frequency needs k >= 1");
  const QueryWindow w = make_window(base_, l, r);
  ScratchGuard seen(base_.color_capacity());
  std::size_t total = 0;

  if (!w.has_span()) {
    scan_counts(base_, w, *seen);
    for (const ColorIndex c : seen->touched()) total += matches(relation, seen->get(c), k) ? 1 : 0;
    return total;
  }

  for_each_adjacent(base_, w, [&](std::size_t idx, Side) {
    const ColorIndex c = base_.color_at(idx);
    if (seen->bump(c) != 0) return;
    const std::size_t f = base_.count_in_range(c, w.lo, w.hi);
    if (f >= 1 && matches(relation, f, k)) ++total;
  });
  const auto& at_left = base_.frequent_prefix(w.left_end);
  const auto& at_right = base_.frequent_prefix(w.right_end);
  for (auto il = at_left.begin(), ir = at_right.begin(); ir != at_right.end(); ++il, ++ir) {
    const std::size_t f = ir->second - il->second;
    if (seen->get(ir->first) == 0 && f >= 1 && matches(relation, f, k)) ++total;
  }

  const auto hist = interior_histogram(base_.pair_index(w.left_end, w.right_end));
  for (std::size_t f = 1; f < hist.size(); ++f) {
    if (matches(relation, f, k)) total += hist[f];
  }
  return total;
}

}  // namespace rfq
