#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rfq::cli {

struct BenchConfig {
  std::vector<std::size_t> sizes{512, 4096, 32768};
  std::size_t ops = 200;
  std::uint64_t seed = 1;
  unsigned sampler_c = 2;
  // Alphabet is n / alphabet_divisor colors (at least 2).
  std::size_t alphabet_divisor = 8;
  // Restrict to these op names; empty runs all.
  std::vector<std::string> only;
};

struct BenchRow {
  std::size_t n = 0;
  std::string op;
  std::size_t ops_run = 0;
  double mean_ns = 0;
  double p50_ns = 0;
  double p99_ns = 0;
};

// Ops: build, MODE, LFZ, LFP, KFREQ, COUNTF, SET, INS, DEL.
std::vector<BenchRow> run_bench(const BenchConfig& config);

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace rfq::cli
