#include "rfq/least_frequent.hpp"

#include <cassert>
#include <limits>

#include "rfq/scratch.hpp"
#include "rfq/window.hpp"

namespace rfq {

LeastFrequentIndex::LeastFrequentIndex(BaseIndex& base) : base_(base) {
  base.add_hook(this);
  after_rebuild();
}

void LeastFrequentIndex::after_rebuild() {
  cells_.assign(base_.pair_count() * (base_.threshold() + 1), {});
  where_.assign(base_.color_capacity(), Location{});
  listed_ = 0;
  for (const auto& [value, c] : base_.registry()) attach(c);
}

void LeastFrequentIndex::attach(ColorIndex c) {
  if (where_.size() <= c) where_.resize(base_.color_capacity(), Location{});
  if (!base_.is_infrequent_present(c)) return;
  const auto& occ = base_.occurrences(c);
  const std::size_t j1 = base_.segment_of(occ[0]);
  const std::size_t j2 = base_.segment_of(occ[occ.size() - 1]) + 1;
  const std::size_t id = cell_id(base_.pair_index(j1, j2), occ.size());
  where_[c] = Location{static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(cells_[id].size())};
  cells_[id].push_back(c);
  ++listed_;
}

void LeastFrequentIndex::detach(ColorIndex c) {
  if (where_.size() <= c || where_[c].cell == kDetached) return;
  auto& list = cells_[where_[c].cell];
  const ColorIndex moved = list.back();
  list[where_[c].pos] = moved;
  where_[moved].pos = where_[c].pos;
  list.pop_back();
  where_[c] = Location{};
  --listed_;
}

void LeastFrequentIndex::refresh_tight_span(ColorIndex c) {
  detach(c);
  attach(c);
}

std::span<const ColorIndex> LeastFrequentIndex::cell(std::size_t j1, std::size_t j2,
                                                     std::size_t f) const {
  return cells_[cell_id(base_.pair_index(j1, j2), f)];
}

std::optional<TightCell> LeastFrequentIndex::cell_of(ColorIndex c) const {
  if (where_.size() <= c || where_[c].cell == kDetached) return std::nullopt;
  const std::size_t row = base_.threshold() + 1;
  return TightCell{where_[c].cell / row, where_[c].cell % row};
}

ErasedHistogram LeastFrequentIndex::compute_erased(std::size_t j1, std::size_t j2,
                                                   std::span<const ColorIndex> erase) const {
  const auto row = base_.histogram(j1, j2);
  ErasedHistogram out(row.begin(), row.end());
  const std::size_t width = base_.segment_width();
  for (const ColorIndex c : erase) --out[base_.count_in_range(c, j1 * width, j2 * width - 1)];
  return out;
}

std::size_t LeastFrequentIndex::memory_words() const noexcept {
  std::size_t words = where_.size();
  for (const auto& list : cells_) words += 3 + list.capacity() / 2;
  return words;
}

QueryAnswer LeastFrequentIndex::range_least_frequent_zero(std::size_t l, std::size_t r) const {
  const QueryWindow w = make_window(base_, l, r);
  ScratchGuard seen(base_.color_capacity());

  if (!w.has_span()) {
    for (std::size_t idx = w.lo; idx <= w.hi; ++idx) {
      if (base_.is_live(idx)) seen->bump(base_.color_at(idx));
    }
    if (base_.registry().size() > seen->touched().size()) {
      // Some present color is missing from the range; one shows up within the
      // first distinct-in-range + 1 registry entries.
      for (const auto& [value, c] : base_.registry()) {
        if (seen->get(c) == 0) return QueryAnswer::hit(value, 0);
      }
    }
    std::size_t best_f = std::numeric_limits<std::size_t>::max();
    ColorIndex best = kNoColor;
    for (const ColorIndex c : seen->touched()) {
      if (seen->get(c) < best_f) {
        best_f = seen->get(c);
        best = c;
      }
    }
    return QueryAnswer::hit(base_.color_value(best), best_f);
  }

  const std::size_t width = base_.segment_width();
  const std::size_t left = w.left_end;
  const std::size_t right = w.right_end;
  std::size_t best_f = std::numeric_limits<std::size_t>::max();
  ColorIndex best = kNoColor;
  auto offer = [&](ColorIndex c, std::size_t f) {
    if (f < best_f) {
      best_f = f;
      best = c;
    }
  };

  for (const ColorIndex c : base_.frequent_colors()) offer(c, base_.count_in_range(c, w.lo, w.hi));

  // Infrequent colors of the flanks.
  std::vector<ColorIndex> flank_colors;
  auto collect = [&](std::size_t from, std::size_t to) {
    for (std::size_t idx = from; idx < to; ++idx) {
      if (!base_.is_live(idx)) continue;
      const ColorIndex c = base_.color_at(idx);
      if (base_.is_frequent(c) || seen->bump(c) != 0) continue;
      flank_colors.push_back(c);
      offer(c, base_.count_in_range(c, w.lo, w.hi));
    }
  };
  collect(w.lo, left * width);
  collect(right * width, w.hi + 1);

  // Remaining infrequent colors never touch the flanks, so their count in
  // [lo, hi] is their count in the span.
  const ErasedHistogram erased = compute_erased(left, right, flank_colors);
  std::size_t f = 0;
  while (f < erased.size() && erased[f] == 0) ++f;
  if (f == erased.size() || f >= best_f) return QueryAnswer::hit(base_.color_value(best), best_f);

  const std::size_t span_lo = left * width;
  const std::size_t span_hi = right * width - 1;
  auto scan_segment = [&](std::size_t s) -> ColorIndex {
    for (std::size_t idx = s * width; idx < (s + 1) * width; ++idx) {
      if (!base_.is_live(idx)) continue;
      const ColorIndex c = base_.color_at(idx);
      if (base_.is_frequent(c) || seen->get(c) != 0) continue;
      if (base_.count_in_range(c, span_lo, span_hi) == f) return c;
    }
    return kNoColor;
  };
  auto done = [&](ColorIndex c) { return QueryAnswer::hit(base_.color_value(c), f); };

  // A color living entirely inside the span is filed in a tight-span list.
  if (f >= 1) {
    for (std::size_t j1 = left; j1 < right; ++j1) {
      for (std::size_t j2 = j1 + 1; j2 <= right; ++j2) {
        const auto list = cell(j1, j2, f);
        if (!list.empty()) return done(list.front());
      }
    }
  }

  // Otherwise some color at f occurs outside the span. Widening the span can
  // only lower erased[f], so binary search for the first endpoint where it
  // drops, on the right first.
  const std::uint32_t target = erased[f];
  const std::size_t last = base_.segment_count();
  auto drops_right = [&](std::size_t end) {
    return compute_erased(left, end, flank_colors)[f] < target;
  };
  if (right < last && drops_right(last)) {
    std::size_t lo = right + 1;
    std::size_t hi = last;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (drops_right(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    if (const ColorIndex c = scan_segment(lo - 1); c != kNoColor) return done(c);
  }

  auto drops_left = [&](std::size_t begin) {
    return compute_erased(begin, right, flank_colors)[f] < target;
  };
  if (left > 0 && drops_left(0)) {
    std::size_t lo = 0;
    std::size_t hi = left - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (drops_left(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    if (const ColorIndex c = scan_segment(lo); c != kNoColor) return done(c);
  }

  assert(false && "least-frequent witness search found no color");
  for (const auto& [value, c] : base_.registry()) {
    if (base_.is_frequent(c) || seen->get(c) != 0) continue;
    if (base_.count_in_range(c, span_lo, span_hi) == f) return done(c);
  }
  return QueryAnswer::hit(base_.color_value(best), best_f);
}

}  // namespace rfq
