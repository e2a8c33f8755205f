#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfq/range_index.hpp"
#include "rfq/types.hpp"

namespace rfq {

// Plain list with brute-force answers to every query.
class ReferenceArray {
 public:
  ReferenceArray() = default;
  explicit ReferenceArray(std::vector<ColorId> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<ColorId>& values() const noexcept { return values_; }
  void set(std::size_t rank, ColorId c);
  void insert(std::size_t rank, ColorId c);
  void erase(std::size_t rank);

 private:
  std::vector<ColorId> values_;
};

// A frequency with every color attaining it, sorted by id.
struct OracleAnswer {
  std::size_t frequency = 0;
  std::vector<ColorId> witnesses;

  bool accepts(ColorId c) const;
};

OracleAnswer oracle_mode(const ReferenceArray& a, std::size_t l, std::size_t r);
// Minimum over every color of the whole list, counts of zero allowed.
OracleAnswer oracle_lfz(const ReferenceArray& a, std::size_t l, std::size_t r);
OracleAnswer oracle_lfp(const ReferenceArray& a, std::size_t l, std::size_t r);
// Colors with exactly k occurrences; frequency is k.
OracleAnswer oracle_kfreq(const ReferenceArray& a, std::size_t l, std::size_t r, std::size_t k);
std::size_t oracle_countf(const ReferenceArray& a, std::size_t l, std::size_t r, std::size_t k,
                          Relation relation);

// Brute-force recount of every maintained table; returns one line per
// violation found (capped), empty when consistent.
std::vector<std::string> verify_structure(const RangeFrequencyIndex& index,
                                          std::size_t max_reports = 20);

struct DiffConfig {
  std::uint64_t seed = 1;
  std::size_t ops = 10000;
  std::size_t max_n = 4096;
  // Alphabet size; 0 picks one from the seed (narrow or wide).
  std::size_t colors = 0;
  // Run verify_structure every this many ops; 0 disables.
  std::size_t verify_every = 0;
  // Percent of ops that modify the array.
  unsigned update_percent = 40;
  // Deletes target colors the sampler just returned. Violates the
  // independence the samplers rely on; for demonstration only.
  bool adversarial = false;
  bool keep_transcript = false;
  Params params{};
};

struct DiffReport {
  bool passed = true;
  std::size_t ops_run = 0;
  std::size_t queries = 0;
  std::size_t updates = 0;
  std::size_t divergences = 0;
  std::size_t sampling_failures = 0;
  std::size_t structure_checks = 0;
  std::size_t structure_violations = 0;
  std::size_t initial_size = 0;
  std::size_t colors = 0;
  std::optional<std::size_t> first_divergence_op;
  std::string first_divergence;
  std::string transcript;
};

DiffReport differential_run(const DiffConfig& config);

std::string relation_name(Relation relation);
// "color=<id> freq=<f>", "none" or "sampling_failure".
std::string format_answer(const QueryAnswer& answer);

}  // namespace rfq
