#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rfq {

// Location of a stored element: queue number and slot within that queue's
// circular buffer. Only meaningful until the element is physically moved, so
// owners keep handles in back-reference slots that the sequence rewrites.
struct ElemHandle {
  std::uint32_t queue = 0;
  std::uint32_t slot = 0;

  friend bool operator==(const ElemHandle&, const ElemHandle&) = default;
};

// Two-level indexed sequence: ceil(n/m) circular queues of exactly m elements
// (the last may be short). O(1) get/set/rank, O(m + n/m) insert/erase.
//
// Every element may carry a back-reference slot. Whenever the element moves,
// its new handle is written through that pointer.
template <typename T>
class TieredSeq {
 public:
  TieredSeq() = default;

  // Fixes the queue capacity at `block_size` for the lifetime of the sequence.
  static TieredSeq with_block_size(std::size_t block_size) {
    if (block_size == 0) throw std::invalid_argument("TieredSeq: block size must be positive");
    TieredSeq seq;
    seq.forced_block_ = block_size;
    seq.block_ = block_size;
    return seq;
  }

  TieredSeq(const TieredSeq&) = delete;
  TieredSeq& operator=(const TieredSeq&) = delete;
  TieredSeq(TieredSeq&&) noexcept = default;
  TieredSeq& operator=(TieredSeq&&) noexcept = default;

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::size_t block_size() const noexcept { return block_; }
  std::size_t queue_count() const noexcept { return heads_.size(); }
  std::size_t frozen_size() const noexcept { return frozen_; }
  // Number of physical element relocations performed so far.
  std::uint64_t moves() const noexcept { return moves_; }
  std::uint64_t rebuilds() const noexcept { return rebuilds_; }

  const T& operator[](std::size_t rank) const noexcept { return slots_[physical(rank)].value; }

  const T& get(std::size_t rank) const {
    check_rank(rank, count_);
    return (*this)[rank];
  }

  void set(std::size_t rank, T value) {
    check_rank(rank, count_);
    slots_[physical(rank)].value = std::move(value);
  }

  const T& at_handle(ElemHandle h) const noexcept { return slots_[flat(h)].value; }
  void set_at_handle(ElemHandle h, T value) noexcept { slots_[flat(h)].value = std::move(value); }

  // Points the element at `h` to a different back-reference slot and writes
  // the handle there.
  void rebind(ElemHandle h, ElemHandle* backref) noexcept {
    slots_[flat(h)].backref = backref;
    if (backref != nullptr) *backref = h;
  }

  std::size_t rank_of(ElemHandle h) const noexcept {
    const std::size_t head = heads_[h.queue];
    return static_cast<std::size_t>(h.queue) * block_ + (h.slot + block_ - head) % block_;
  }

  ElemHandle handle_of(std::size_t rank) const {
    check_rank(rank, count_);
    return to_handle(physical(rank));
  }

  ElemHandle push_back(T value, ElemHandle* backref = nullptr) {
    return insert(count_, std::move(value), backref);
  }

  ElemHandle insert(std::size_t rank, T value, ElemHandle* backref = nullptr) {
    check_rank(rank, count_ + 1);
    if (block_ == 0) reset_layout(1);

    const std::size_t m = block_;
    std::size_t q = rank / m;
    const std::size_t offset = rank % m;
    const std::size_t nq = heads_.size();

    Slot carry{std::move(value), backref};
    const std::uint64_t epoch = rebuilds_;
    ElemHandle result{};

    if (q == nq) {
      append_queue();
      place(q, 0, std::move(carry));
      result = to_handle(q * m);
      ++count_;
      maybe_resize();
      return epoch == rebuilds_ ? result : to_handle(physical(rank));
    }

    // Insert into queue q; a full queue spills its last element.
    const std::size_t size_q = queue_size(q);
    const bool full = size_q == m;
    std::size_t last = full ? m - 1 : size_q;
    Slot spill;
    if (full) spill = std::move(slots_[physical_in(q, m - 1)]);
    for (std::size_t k = last; k > offset; --k) move_slot(q, k - 1, k);
    place(q, offset, std::move(carry));
    result = to_handle(physical_in(q, offset));

    if (full) {
      carry = std::move(spill);
      ++q;
      // Cascade: push carry onto the front of each following full queue,
      // popping its back, until a queue with room (or a new queue) takes it.
      while (q < heads_.size() && queue_size(q) == m) {
        std::uint32_t& head = heads_[q];
        head = static_cast<std::uint32_t>((head + m - 1) % m);
        Slot out = std::move(slots_[q * m + head]);
        place_at_flat(q * m + head, std::move(carry));
        carry = std::move(out);
        ++q;
      }
      if (q == heads_.size()) {
        append_queue();
        place(q, 0, std::move(carry));
      } else {
        std::uint32_t& head = heads_[q];
        head = static_cast<std::uint32_t>((head + m - 1) % m);
        place_at_flat(q * m + head, std::move(carry));
      }
    }
    ++count_;
    maybe_resize();
    return epoch == rebuilds_ ? result : to_handle(physical(rank));
  }

  void erase(std::size_t rank) {
    check_rank(rank, count_);
    const std::size_t m = block_;
    const std::size_t q = rank / m;
    const std::size_t offset = rank % m;
    const std::size_t size_q = queue_size(q);
    for (std::size_t k = offset + 1; k < size_q; ++k) move_slot(q, k, k - 1);
    slots_[physical_in(q, size_q - 1)] = Slot{};

    // Refill the vacancy at the end of queue q from the heads of later queues.
    for (std::size_t p = q + 1; p < heads_.size(); ++p) {
      const std::size_t src = p * m + heads_[p];
      const std::size_t dst = physical_in(p - 1, m - 1);
      place_at_flat(dst, std::move(slots_[src]));
      slots_[src] = Slot{};
      heads_[p] = static_cast<std::uint32_t>((heads_[p] + 1) % m);
    }
    --count_;
    if (heads_.size() * m - count_ == m) {
      heads_.pop_back();
      slots_.resize(heads_.size() * m);
    }
    maybe_resize();
  }

  // Smallest rank whose element is not less than `key`; contents must be sorted.
  std::size_t lower_bound(const T& key) const {
    std::size_t lo = 0;
    std::size_t hi = count_;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if ((*this)[mid] < key) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

  std::vector<T> to_vector() const {
    std::vector<T> out;
    out.reserve(count_);
    for (std::size_t r = 0; r < count_; ++r) out.push_back((*this)[r]);
    return out;
  }

  // Re-lays out all elements with a block size fitted to the current count.
  void rebuild() {
    const std::size_t target = count_ == 0 ? 1 : count_;
    reset_layout(target);
  }

 private:
  struct Slot {
    T value{};
    ElemHandle* backref = nullptr;
  };

  static void check_rank(std::size_t rank, std::size_t limit) {
    if (rank >= limit) {
      throw std::out_of_range("TieredSeq: rank " + std::to_string(rank) + " out of range (size " +
                              std::to_string(limit) + ")");
    }
  }

  static std::size_t ceil_sqrt(std::size_t n) {
    auto m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (m * m < n) ++m;
    while (m > 1 && (m - 1) * (m - 1) >= n) --m;
    return m == 0 ? 1 : m;
  }

  std::size_t queue_size(std::size_t q) const noexcept {
    return q + 1 < heads_.size() ? block_ : count_ - q * block_;
  }
  std::size_t physical_in(std::size_t q, std::size_t offset) const noexcept {
    return q * block_ + (heads_[q] + offset) % block_;
  }
  std::size_t physical(std::size_t rank) const noexcept {
    return physical_in(rank / block_, rank % block_);
  }
  std::size_t flat(ElemHandle h) const noexcept {
    return static_cast<std::size_t>(h.queue) * block_ + h.slot;
  }
  ElemHandle to_handle(std::size_t flat_pos) const noexcept {
    return ElemHandle{static_cast<std::uint32_t>(flat_pos / block_),
                      static_cast<std::uint32_t>(flat_pos % block_)};
  }

  void append_queue() {
    heads_.push_back(0);
    slots_.resize(heads_.size() * block_);
  }

  void place_at_flat(std::size_t pos, Slot&& s) {
    slots_[pos] = std::move(s);
    if (slots_[pos].backref != nullptr) *slots_[pos].backref = to_handle(pos);
    ++moves_;
  }
  void place(std::size_t q, std::size_t offset, Slot&& s) {
    place_at_flat(physical_in(q, offset), std::move(s));
  }
  void move_slot(std::size_t q, std::size_t from, std::size_t to) {
    place(q, to, std::move(slots_[physical_in(q, from)]));
  }

  void maybe_resize() {
    if (forced_block_ != 0) return;
    if (count_ > 2 * frozen_ || 2 * count_ < frozen_) rebuild();
  }

  void reset_layout(std::size_t frozen) {
    std::vector<Slot> old;
    old.reserve(count_);
    for (std::size_t r = 0; r < count_; ++r) old.push_back(std::move(slots_[physical(r)]));
    frozen_ = frozen;
    block_ = forced_block_ != 0 ? forced_block_ : ceil_sqrt(frozen);
    const std::size_t nq = (count_ + block_ - 1) / block_;
    heads_.assign(nq, 0);
    slots_.assign(nq * block_, Slot{});
    for (std::size_t r = 0; r < old.size(); ++r) place_at_flat(r, std::move(old[r]));
    ++rebuilds_;
  }

  std::vector<Slot> slots_;
  std::vector<std::uint32_t> heads_;
  std::size_t count_ = 0;
  std::size_t block_ = 0;
  std::size_t forced_block_ = 0;
  std::size_t frozen_ = 0;
  std::uint64_t moves_ = 0;
  std::uint64_t rebuilds_ = 0;
};

}  // namespace rfq
