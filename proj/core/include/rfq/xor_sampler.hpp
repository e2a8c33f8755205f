#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace rfq {

inline constexpr unsigned kMaxLevel = 64;

// 64-bit finalizer (splitmix64); bijective with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Geometric level in [1, 64]: P[level = i] = 2^-i over the choice of seed.
unsigned level_of(std::uint64_t x, std::uint64_t copy_seed) noexcept;

// The seeds of the independent sketch copies. Samplers that share a family
// agree on every element's level in every copy, so a level signature can be
// computed once and applied to many samplers.
class SketchFamily {
 public:
  SketchFamily(std::size_t copies, std::uint64_t master_seed);

  // c * ceil(log2 n_bound), at least one copy.
  static std::size_t copies_for(std::size_t n_bound, unsigned c) noexcept;

  std::size_t copies() const noexcept { return seeds_.size(); }
  std::uint64_t seed(std::size_t copy) const noexcept { return seeds_[copy]; }
  std::uint64_t master_seed() const noexcept { return master_; }

  // Level of `x` in each copy; `out` must hold copies() entries.
  void levels(std::uint64_t x, std::span<std::uint8_t> out) const noexcept;
  std::vector<std::uint8_t> levels(std::uint64_t x) const;

 private:
  std::vector<std::uint64_t> seeds_;
  std::uint64_t master_;
};

enum class RetrieveStatus : std::uint8_t { found, empty, failure };

struct RetrieveResult {
  RetrieveStatus status = RetrieveStatus::empty;
  std::uint64_t value = 0;
};

// One level of one copy: XOR of the live elements at that level and their
// exact count.
struct LevelCell {
  std::uint64_t mask = 0;
  std::uint32_t count = 0;
};

// Read-only view of one copy's levels; level(0) is level 1.
struct LevelSketchView {
  const LevelCell* first = nullptr;
  std::size_t stride = 0;
  unsigned max_level = 0;
  const LevelCell& level(unsigned i) const noexcept { return first[i * stride]; }
};

// Monte Carlo set supporting insert, delete and retrieval of some live
// element. Each copy keeps, per level, the XOR of the live elements at that
// level and their exact count. Retrieval succeeds on a copy whose top
// occupied level holds exactly one element.
//
// Contract: elements are distinct, only live elements are deleted, and
// deletions do not depend on earlier retrieve() results.
class Sampler {
 public:
  explicit Sampler(std::shared_ptr<const SketchFamily> family);
  Sampler(std::size_t n_bound, unsigned c, std::uint64_t seed);

  void insert(std::uint64_t x);
  void remove(std::uint64_t x);
  // Variants taking a precomputed family.levels(x).
  void insert(std::uint64_t x, std::span<const std::uint8_t> levels);
  void remove(std::uint64_t x, std::span<const std::uint8_t> levels);

  // Hints the cache lines that insert/remove with these levels will touch.
  void prefetch(std::span<const std::uint8_t> levels) const noexcept {
    const std::size_t n = max_level_.size();
    __builtin_prefetch(max_level_.data(), 1);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = levels[j] - 1U;
      if (row < stride_) __builtin_prefetch(cells_.data() + row * n + j, 1);
    }
  }

  RetrieveResult retrieve() const noexcept;
  RetrieveResult retrieve_from_copy(std::size_t copy) const noexcept;

  std::size_t live_count() const noexcept { return live_; }
  std::size_t copies() const noexcept { return max_level_.size(); }
  const SketchFamily& family() const noexcept { return *family_; }
  LevelSketchView copy_state(std::size_t copy) const noexcept;

  // Logical equality of every copy's masks, counters and top level.
  bool same_state(const Sampler& other) const noexcept;

  std::size_t memory_words() const noexcept;

 private:
  void grow_stride(unsigned needed);

  std::shared_ptr<const SketchFamily> family_;
  // Level-major: `stride_` rows of copies() cells, row i holding level i + 1.
  std::vector<LevelCell> cells_;
  std::vector<std::uint8_t> max_level_;
  unsigned stride_ = 0;
  std::size_t live_ = 0;
};

}  // namespace rfq
