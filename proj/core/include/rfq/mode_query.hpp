#pragma once

#include <cstddef>

#include "rfq/base_index.hpp"
#include "rfq/types.hpp"

namespace rfq {

// Most frequent color in rank range [l, r] and its frequency. Ties resolve
// to any color of maximum frequency.
QueryAnswer range_mode(const BaseIndex& base, std::size_t l, std::size_t r);

// Direct scan of [l, r]; used when the range holds no complete span.
QueryAnswer small_range_mode(const BaseIndex& base, std::size_t l, std::size_t r);

}  // namespace rfq
