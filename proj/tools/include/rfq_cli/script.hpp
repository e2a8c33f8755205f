#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfq/oracle.hpp"
#include "rfq/range_index.hpp"

namespace rfq::cli {

enum class CommandKind { set, ins, del, mode, lfz, lfp, kfreq, countf };

struct Command {
  CommandKind kind = CommandKind::mode;
  std::size_t line = 0;
  std::size_t a = 0;  // rank, or l
  std::size_t b = 0;  // r
  std::uint64_t value = 0;  // color for SET/INS, k for KFREQ/COUNTF
  Relation relation = Relation::at;

  bool is_query() const noexcept { return kind >= CommandKind::mode; }
  // The command as written, normalized: "KFREQ 0 5 3".
  std::string text() const;
};

using OpScript = std::vector<Command>;

// An input problem tied to a line (0 when not line-specific).
class InputError : public std::runtime_error {
 public:
  InputError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Blank lines and lines starting with '#' are skipped.
OpScript parse_script(std::istream& in);
std::vector<ColorId> parse_array(std::istream& in);

struct RunResult {
  std::size_t divergences = 0;
  std::string first_divergence;
};

// Executes the script, printing one line per query. With `verify`, every
// command is mirrored on a reference array and checked against it.
RunResult run_script(RangeFrequencyIndex& index, const OpScript& script, std::ostream& out,
                     bool verify);

}  // namespace rfq::cli
