#pragma once

#include <cstddef>

#include "rfq/base_index.hpp"
#include "rfq/types.hpp"

namespace rfq {

// Live elements of a segment always form a prefix of its slots. A segment
// must keep at least half_width / 2 and fewer than 2 * half_width live elements, and
// the live count must stay within [n / 2, 2n] of the size at the last build.
struct RebuildPolicy {
  static bool segment_ok(const BaseIndex& base, std::size_t s) noexcept {
    const std::size_t occ = base.segment_occupancy(s);
    return 2 * occ >= base.half_width() && occ < base.segment_width();
  }
  static bool size_ok(const BaseIndex& base) noexcept {
    const std::size_t live = base.live_count();
    const std::size_t frozen = base.frozen_size();
    return 2 * live >= frozen && live <= 2 * frozen;
  }
};

// Inserts color at `rank`, shifting later elements of the segment back.
void insert_element(BaseIndex& base, std::size_t rank, ColorId color);
// Removes the element at `rank`, shifting later elements of its segment forward.
void delete_element(BaseIndex& base, std::size_t rank);
// Rebuilds when any segment or the global size breaks the policy.
bool maybe_rebuild(BaseIndex& base);

}  // namespace rfq
