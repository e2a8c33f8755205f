#include "rfq/xor_sampler.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace rfq {

unsigned level_of(std::uint64_t x, std::uint64_t copy_seed) noexcept {
  const std::uint64_t h = mix64(mix64(x) ^ copy_seed);
  return std::min<unsigned>(1U + static_cast<unsigned>(std::countl_zero(h)), kMaxLevel);
}

SketchFamily::SketchFamily(std::size_t copies, std::uint64_t master_seed) : master_(master_seed) {
  if (copies == 0) throw std::invalid_argument("SketchFamily: need at least one copy");
  seeds_.reserve(copies);
  std::uint64_t state = master_seed;
  for (std::size_t j = 0; j < copies; ++j) {
    state += 0x9e3779b97f4a7c15ULL;
    seeds_.push_back(mix64(state));
  }
}

std::size_t SketchFamily::copies_for(std::size_t n_bound, unsigned c) noexcept {
  std::size_t log_n = 0;
  while ((std::size_t{1} << log_n) < n_bound) ++log_n;
  return std::max<std::size_t>(1, static_cast<std::size_t>(c) * log_n);
}

void SketchFamily::levels(std::uint64_t x, std::span<std::uint8_t> out) const noexcept {
  const std::uint64_t base = mix64(x);
  for (std::size_t j = 0; j < seeds_.size(); ++j) {
    const std::uint64_t h = mix64(base ^ seeds_[j]);
    out[j] = static_cast<std::uint8_t>(
        std::min<unsigned>(1U + static_cast<unsigned>(std::countl_zero(h)), kMaxLevel));
  }
}

std::vector<std::uint8_t> SketchFamily::levels(std::uint64_t x) const {
  std::vector<std::uint8_t> out(seeds_.size());
  levels(x, out);
  return out;
}

Sampler::Sampler(std::shared_ptr<const SketchFamily> family)
    : family_(std::move(family)), max_level_(family_->copies(), 0) {}

Sampler::Sampler(std::size_t n_bound, unsigned c, std::uint64_t seed)
    : Sampler(std::make_shared<const SketchFamily>(SketchFamily::copies_for(n_bound, c), seed)) {}

void Sampler::grow_stride(unsigned needed) {
  cells_.resize(copies() * needed);
  stride_ = needed;
}

void Sampler::insert(std::uint64_t x) {
  std::array<std::uint8_t, 256> buf{};
  if (copies() <= buf.size()) {
    family_->levels(x, std::span(buf.data(), copies()));
    insert(x, std::span<const std::uint8_t>(buf.data(), copies()));
  } else {
    insert(x, family_->levels(x));
  }
}

void Sampler::remove(std::uint64_t x) {
  std::array<std::uint8_t, 256> buf{};
  if (copies() <= buf.size()) {
    family_->levels(x, std::span(buf.data(), copies()));
    remove(x, std::span<const std::uint8_t>(buf.data(), copies()));
  } else {
    remove(x, family_->levels(x));
  }
}

void Sampler::insert(std::uint64_t x, std::span<const std::uint8_t> levels) {
  const std::size_t n = copies();
  for (std::size_t j = 0; j < n; ++j) {
    const unsigned lvl = levels[j];
    if (lvl > stride_) grow_stride(std::min(kMaxLevel, std::max(lvl, stride_ + 2)));
    LevelCell& cell = cells_[(lvl - 1) * n + j];
    cell.mask ^= x;
    ++cell.count;
    if (lvl > max_level_[j]) max_level_[j] = static_cast<std::uint8_t>(lvl);
  }
  ++live_;
}

void Sampler::remove(std::uint64_t x, std::span<const std::uint8_t> levels) {
  const std::size_t n = copies();
  for (std::size_t j = 0; j < n; ++j) {
    const unsigned lvl = levels[j];
    LevelCell& cell = cells_[(lvl - 1) * n + j];
    cell.mask ^= x;
    if (--cell.count == 0 && lvl == max_level_[j]) {
      unsigned top = lvl - 1;
      while (top > 0 && cells_[(top - 1) * n + j].count == 0) --top;
      max_level_[j] = static_cast<std::uint8_t>(top);
    }
  }
  --live_;
}

RetrieveResult Sampler::retrieve_from_copy(std::size_t copy) const noexcept {
  if (live_ == 0) return {RetrieveStatus::empty, 0};
  const unsigned top = max_level_[copy];
  if (top == 0) return {RetrieveStatus::failure, 0};
  const LevelCell& cell = cells_[(top - 1) * copies() + copy];
  if (cell.count == 1) return {RetrieveStatus::found, cell.mask};
  return {RetrieveStatus::failure, 0};
}

RetrieveResult Sampler::retrieve() const noexcept {
  if (live_ == 0) return {RetrieveStatus::empty, 0};
  for (std::size_t j = 0; j < copies(); ++j) {
    const RetrieveResult r = retrieve_from_copy(j);
    if (r.status == RetrieveStatus::found) return r;
  }
  return {RetrieveStatus::failure, 0};
}

LevelSketchView Sampler::copy_state(std::size_t copy) const noexcept {
  return LevelSketchView{cells_.data() + copy, copies(), max_level_[copy]};
}

bool Sampler::same_state(const Sampler& other) const noexcept {
  if (copies() != other.copies() || live_ != other.live_) return false;
  for (std::size_t j = 0; j < copies(); ++j) {
    const LevelSketchView a = copy_state(j);
    const LevelSketchView b = other.copy_state(j);
    if (a.max_level != b.max_level) return false;
    for (unsigned l = 0; l < a.max_level; ++l) {
      if (a.level(l).mask != b.level(l).mask || a.level(l).count != b.level(l).count) return false;
    }
  }
  return true;
}

std::size_t Sampler::memory_words() const noexcept {
  // A level cell is two words with padding; top-level bytes pack eight to a word.
  return 2 * cells_.size() + (max_level_.size() + 7) / 8 + 2;
}

}  // namespace rfq
