#include "rfq/mode_query.hpp"

#include <cassert>

#include "rfq/scratch.hpp"
#include "rfq/window.hpp"

namespace rfq {

namespace {

QueryAnswer scan_mode(const BaseIndex& base, std::size_t lo, std::size_t hi) {
  ScratchGuard counts(base.color_capacity());
  std::size_t best_f = 0;
  ColorIndex best = kNoColor;
  for (std::size_t idx = lo; idx <= hi; ++idx) {
    if (!base.is_live(idx)) continue;
    const ColorIndex c = base.color_at(idx);
    const std::size_t f = counts->bump(c) + 1;
    if (f > best_f) {
      best_f = f;
      best = c;
    }
  }
  return QueryAnswer::hit(base.color_value(best), best_f);
}

}  // namespace

QueryAnswer small_range_mode(const BaseIndex& base, std::size_t l, std::size_t r) {
  const QueryWindow w = make_window(base, l, r);
  return scan_mode(base, w.lo, w.hi);
}

QueryAnswer range_mode(const BaseIndex& base, std::size_t l, std::size_t r) {
  const QueryWindow w = make_window(base, l, r);
  if (!w.has_span()) return scan_mode(base, w.lo, w.hi);

  const std::size_t width = base.segment_width();
  const std::size_t left = w.left_end;
  const std::size_t right = w.right_end;
  std::size_t best_f = 0;
  ColorIndex best = kNoColor;

  // Frequent colors inside the span, from the prefix maps. Both maps hold the
  // same key set.
  const auto& at_left = base.frequent_prefix(left);
  const auto& at_right = base.frequent_prefix(right);
  for (auto il = at_left.begin(), ir = at_right.begin(); ir != at_right.end(); ++il, ++ir) {
    const std::size_t f = ir->second - il->second;
    if (f > best_f) {
      best_f = f;
      best = ir->first;
    }
  }

  // Infrequent colors inside the span: the top nonzero histogram entry. Its
  // witness is located only if no flank color beats it.
  const auto row = base.histogram(left, right);
  std::size_t top = row.size() - 1;
  while (top > 0 && row[top] == 0) --top;
  bool span_witness_pending = false;
  if (top > best_f) {
    best_f = top;
    best = kNoColor;
    span_witness_pending = true;
  }

  // Flank elements: only a color that beats best_f over the whole range
  // matters; when one does, walk its occurrence list to the exact count.
  auto extend = [&](std::size_t idx, Side side) {
    if (!base.is_live(idx)) return;
    const ColorIndex c = base.color_at(idx);
    if (base.total_count(c) <= best_f) return;
    const std::size_t bound = side == Side::right ? w.hi : w.lo;
    if (!base.frequency_test(idx, bound, best_f + 1, side).at_least) return;
    const auto& occ = base.occurrences(c);
    const std::size_t pos = occ.rank_of(base.handle_at(idx));
    std::size_t f = best_f + 1;
    if (side == Side::right) {
      while (pos + f < occ.size() && occ[pos + f] <= w.hi) ++f;
    } else {
      while (pos >= f && occ[pos - f] >= w.lo) ++f;
    }
    best_f = f;
    best = c;
    span_witness_pending = false;
  };
  for (std::size_t idx = w.lo; idx < left * width; ++idx) extend(idx, Side::right);
  for (std::size_t idx = right * width; idx <= w.hi; ++idx) extend(idx, Side::left);

  if (span_witness_pending) {
    std::size_t cur = right;
    while (best == kNoColor && cur > left) {
      const std::size_t prev = cur - 1;
      const std::uint32_t here = base.histogram(left, cur)[top];
      const std::uint32_t before = prev == left ? 0 : base.histogram(left, prev)[top];
      if (before < here) {
        // Some color with top occurrences in [left, cur) has its last one in
        // segment prev.
        const std::size_t span_lo = left * width;
        const std::size_t span_end = cur * width;
        for (std::size_t idx = prev * width; idx < span_end && best == kNoColor; ++idx) {
          if (!base.is_live(idx)) continue;
          const ColorIndex c = base.color_at(idx);
          if (base.is_frequent(c)) continue;
          const auto& occ = base.occurrences(c);
          const std::size_t pos = occ.rank_of(base.handle_at(idx));
          const bool last_in_span = pos + 1 == occ.size() || occ[pos + 1] >= span_end;
          if (last_in_span && base.frequency_test(idx, span_lo, top, Side::left).exactly) best = c;
        }
      }
      cur = prev;
    }
    assert(best != kNoColor);
  }
  return QueryAnswer::hit(base.color_value(best), best_f);
}

}  // namespace rfq
