#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rfq/types.hpp"

namespace rfq {

// Per-color counter table cleared through the list of touched keys, so a
// query pays only for the colors it sees. One instance per thread.
class ScratchCounter {
 public:
  void reserve(std::size_t colors) {
    if (counts_.size() < colors) counts_.resize(colors, 0);
  }

  std::uint32_t get(ColorIndex c) const noexcept { return counts_[c]; }

  // Returns the count before incrementing.
  std::uint32_t bump(ColorIndex c) {
    if (counts_[c] == 0) touched_.push_back(c);
    return counts_[c]++;
  }

  const std::vector<ColorIndex>& touched() const noexcept { return touched_; }

  void clear() noexcept {
    for (const ColorIndex c : touched_) counts_[c] = 0;
    touched_.clear();
  }

  bool clean() const noexcept {
    if (!touched_.empty()) return false;
    for (const std::uint32_t v : counts_) {
      if (v != 0) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint32_t> counts_;
  std::vector<ColorIndex> touched_;
};

// Borrows the calling thread's scratch table for the lifetime of the guard.
class ScratchGuard {
 public:
  explicit ScratchGuard(std::size_t colors) : table_(thread_table()) { table_.reserve(colors); }
  ~ScratchGuard() { table_.clear(); }
  ScratchGuard(const ScratchGuard&) = delete;
  ScratchGuard& operator=(const ScratchGuard&) = delete;

  ScratchCounter* operator->() noexcept { return &table_; }
  ScratchCounter& operator*() noexcept { return table_; }

  static ScratchCounter& thread_table() {
    thread_local ScratchCounter table;
    return table;
  }

 private:
  ScratchCounter& table_;
};

}  // namespace rfq
