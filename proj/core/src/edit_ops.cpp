#include "rfq/edit_ops.hpp"

#include <stdexcept>
#include <string>

namespace rfq {

namespace {

void check_rank(std::size_t rank, std::size_t limit, const char* what) {
  if (rank > limit) {
    throw std::out_of_range(std::string(what) + ": rank " + std::to_string(rank) +
                            " out of range (limit " + std::to_string(limit) + ")");
  }
}

void rebuild_if_needed(BaseIndex& base, std::size_t s) {
  if (base.live_count() == 0) {
    base.build({});
  } else if (!RebuildPolicy::size_ok(base) ||
             (s < base.segment_count() && !RebuildPolicy::segment_ok(base, s))) {
    base.rebuild();
  }
}

}  // namespace

void insert_element(BaseIndex& base, std::size_t rank, ColorId color) {
  const std::size_t live = base.live_count();
  check_rank(rank, live, "insert");
  if (live == 0) {
    const ColorId one[] = {color};
    base.build(one);
    return;
  }

  // Segments are never full between operations, so the slot after the last
  // element is free.
  const std::size_t pos = rank < live ? base.rank_to_index(rank) : base.rank_to_index(live - 1) + 1;
  const std::size_t s = base.segment_of(pos);
  const std::size_t end = s * base.segment_width() + base.segment_occupancy(s);
  for (std::size_t idx = end; idx > pos; --idx) base.move_element(idx - 1, idx);
  base.add_occurrence(pos, color);
  rebuild_if_needed(base, s);
}

void delete_element(BaseIndex& base, std::size_t rank) {
  if (base.live_count() == 0) throw std::out_of_range("delete: structure is empty");
  check_rank(rank, base.live_count() - 1, "delete");
  const std::size_t pos = base.rank_to_index(rank);
  const std::size_t s = base.segment_of(pos);
  const std::size_t end = s * base.segment_width() + base.segment_occupancy(s);
  base.remove_occurrence(pos);
  for (std::size_t idx = pos + 1; idx < end; ++idx) base.move_element(idx, idx - 1);
  rebuild_if_needed(base, s);
}

bool maybe_rebuild(BaseIndex& base) {
  bool ok = RebuildPolicy::size_ok(base);
  for (std::size_t s = 0; ok && s < base.segment_count(); ++s) ok = RebuildPolicy::segment_ok(base, s);
  if (ok) return false;
  base.rebuild();
  return true;
}

}  // namespace rfq
