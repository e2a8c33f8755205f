#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace rfq {

// Identity of an array element; all frequency questions are asked per color.
using ColorId = std::uint64_t;

// Dense registry slot of a present color. Internal to the index.
using ColorIndex = std::uint32_t;
inline constexpr ColorIndex kNoColor = 0xffffffffU;

enum class Status : std::uint8_t { found, none, sampling_failure };

struct QueryAnswer {
  Status status = Status::none;
  ColorId color = 0;
  std::size_t frequency = 0;

  bool found() const noexcept { return status == Status::found; }

  static QueryAnswer hit(ColorId c, std::size_t f) noexcept { return {Status::found, c, f}; }
  static QueryAnswer miss() noexcept { return {}; }
  static QueryAnswer sampling_failed(std::size_t f = 0) noexcept {
    return {Status::sampling_failure, 0, f};
  }
};

enum class Relation : std::uint8_t { below, at, above };

enum class Side : std::uint8_t { left, right };

struct Params {
  // Overrides for the segment half-width (live slots per segment at build)
  // and the frequent-color threshold. Both default to n^(2/3) and n^(1/3).
  std::optional<std::size_t> block_size;
  std::optional<std::size_t> threshold;
  // Failure exponent of the k-frequency samplers.
  unsigned sampler_c = 2;
  std::uint64_t seed = 0x5eed'0f'c0'10'5ULL;
  // Testing only: skip the n-th (1-based) histogram decrement.
  std::uint64_t fault_skip_histogram_decrement = 0;
};

}  // namespace rfq
