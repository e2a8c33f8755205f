#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "rfq/base_index.hpp"

namespace rfq {

// A rank query [l, r] translated to internal indices, with the innermost
// endpoints: left_end is the first endpoint at or after lo, right_end the
// last endpoint whose span still ends inside [lo, hi].
struct QueryWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t left_end = 0;
  std::size_t right_end = 0;

  bool has_span() const noexcept { return left_end < right_end; }
};

inline QueryWindow make_window(const BaseIndex& base, std::size_t l, std::size_t r) {
  if (l > r || r >= base.live_count()) {
    throw std::out_of_range("query range [" + std::to_string(l) + ", " + std::to_string(r) +
                            "] invalid for size " + std::to_string(base.live_count()));
  }
  QueryWindow w;
  w.lo = base.rank_to_index(l);
  w.hi = base.rank_to_index(r);
  const std::size_t width = base.segment_width();
  w.left_end = (w.lo + width - 1) / width;
  w.right_end = (w.hi + 1) / width;
  return w;
}

}  // namespace rfq
