#include "rfq_cli/script.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace rfq::cli {

namespace {

struct CommandShape {
  std::string_view name;
  CommandKind kind;
  std::size_t arity;
};

constexpr CommandShape kShapes[] = {
    {"SET", CommandKind::set, 2},   {"INS", CommandKind::ins, 2},
    {"DEL", CommandKind::del, 1},   {"MODE", CommandKind::mode, 2},
    {"LFZ", CommandKind::lfz, 2},   {"LFP", CommandKind::lfp, 2},
    {"KFREQ", CommandKind::kfreq, 3}, {"COUNTF", CommandKind::countf, 4},
};

std::string_view name_of(CommandKind kind) {
  for (const CommandShape& s : kShapes) {
    if (s.kind == kind) return s.name;
  }
  return "?";
}

std::uint64_t parse_number(std::string_view token, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw InputError(line, "expected a non-negative decimal number, got '" + std::string(token) + "'");
  }
  return v;
}

Relation parse_relation(std::string_view token, std::size_t line) {
  if (token == "LT") return Relation::below;
  if (token == "EQ") return Relation::at;
  if (token == "GT") return Relation::above;
  throw InputError(line, "expected LT, EQ or GT, got '" + std::string(token) + "'");
}

}  // namespace

std::string Command::text() const {
  std::ostringstream os;
  os << name_of(kind);
  switch (kind) {
    case CommandKind::set:
    case CommandKind::ins:
      os << ' ' << a << ' ' << value;
      break;
    case CommandKind::del:
      os << ' ' << a;
      break;
    case CommandKind::mode:
    case CommandKind::lfz:
    case CommandKind::lfp:
      os << ' ' << a << ' ' << b;
      break;
    case CommandKind::kfreq:
      os << ' ' << a << ' ' << b << ' ' << value;
      break;
    case CommandKind::countf:
      os << ' ' << a << ' ' << b << ' ' << value << ' ' << relation_name(relation);
      break;
  }
  return os.str();
}

OpScript parse_script(std::istream& in) {
  OpScript script;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream words(raw);
    std::vector<std::string> tokens;
    for (std::string t; words >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens[0][0] == '#') continue;

    const CommandShape* shape = nullptr;
    for (const CommandShape& s : kShapes) {
      if (tokens[0] == s.name) shape = &s;
    }
    if (shape == nullptr) throw InputError(line, "unknown command '" + tokens[0] + "'");
    if (tokens.size() != shape->arity + 1) {
      throw InputError(line, std::string(shape->name) + " takes " + std::to_string(shape->arity) +
                                 " arguments, got " + std::to_string(tokens.size() - 1));
    }

    Command cmd;
    cmd.kind = shape->kind;
    cmd.line = line;
    cmd.a = parse_number(tokens[1], line);
    switch (cmd.kind) {
      case CommandKind::set:
      case CommandKind::ins:
        cmd.value = parse_number(tokens[2], line);
        break;
      case CommandKind::del:
        break;
      case CommandKind::countf:
        cmd.relation = parse_relation(tokens[4], line);
        [[fallthrough]];
      case CommandKind::kfreq:
        cmd.value = parse_number(tokens[3], line);
        if (cmd.value == 0) throw InputError(line, "k must be at least 1");
        [[fallthrough]];
      default:
        cmd.b = parse_number(tokens[2], line);
        if (cmd.a > cmd.b) throw InputError(line, "range start exceeds range end");
    }
    script.push_back(cmd);
  }
  return script;
}

std::vector<ColorId> parse_array(std::istream& in) {
  std::vector<ColorId> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream words(raw);
    for (std::string t; words >> t;) out.push_back(parse_number(t, line));
  }
  return out;
}

namespace {

void check_range(const RangeFrequencyIndex& index, const Command& cmd) {
  const std::size_t n = index.size();
  const bool bad = cmd.is_query() ? cmd.b >= n
                   : cmd.kind == CommandKind::ins ? cmd.a > n
                                                  : cmd.a >= n;
  if (bad) {
    throw InputError(cmd.line, cmd.text() + ": rank out of range for size " + std::to_string(n));
  }
}

bool agrees(const QueryAnswer& got, const OracleAnswer& want) {
  return got.found() && got.frequency == want.frequency && want.accepts(got.color);
}

}  // namespace

RunResult run_script(RangeFrequencyIndex& index, const OpScript& script, std::ostream& out,
                     bool verify) {
  RunResult result;
  ReferenceArray ref;
  if (verify) ref = ReferenceArray(index.to_vector());
  auto diverged = [&](const Command& cmd, const std::string& detail) {
    if (result.divergences++ == 0) {
      result.first_divergence = "line " + std::to_string(cmd.line) + ": " + cmd.text() + " " + detail;
    }
  };

  for (const Command& cmd : script) {
    check_range(index, cmd);
    const std::size_t l = cmd.a;
    const std::size_t r = cmd.b;
    switch (cmd.kind) {
      case CommandKind::set:
        index.set(l, cmd.value);
        if (verify) ref.set(l, cmd.value);
        continue;
      case CommandKind::ins:
        index.insert(l, cmd.value);
        if (verify) ref.insert(l, cmd.value);
        continue;
      case CommandKind::del:
        index.erase(l);
        if (verify) ref.erase(l);
        continue;
      case CommandKind::countf: {
        const std::size_t got = index.count_with_frequency(l, r, cmd.value, cmd.relation);
        out << cmd.text() << " -> count=" << got << '\n';
        if (verify) {
          const std::size_t want = oracle_countf(ref, l, r, cmd.value, cmd.relation);
          if (got != want) diverged(cmd, "expected count=" + std::to_string(want));
        }
        continue;
      }
      default:
        break;
    }

    QueryAnswer got;
    OracleAnswer want;
    if (cmd.kind == CommandKind::mode) {
      got = index.mode(l, r);
      if (verify) want = oracle_mode(ref, l, r);
    } else if (cmd.kind == CommandKind::lfz) {
      got = index.least_frequent_zero(l, r);
      if (verify) want = oracle_lfz(ref, l, r);
    } else if (cmd.kind == CommandKind::lfp) {
      got = index.least_frequent_present(l, r);
      if (verify) want = oracle_lfp(ref, l, r);
    } else {
      got = index.k_frequency(l, r, cmd.value);
      if (verify) want = oracle_kfreq(ref, l, r, cmd.value);
    }
    out << cmd.text() << " -> " << format_answer(got) << '\n';
    if (!verify) continue;
    if (cmd.kind != CommandKind::kfreq) {
      if (!agrees(got, want)) diverged(cmd, "expected freq=" + std::to_string(want.frequency));
    } else if (got.status == Status::sampling_failure) {
      if (want.witnesses.empty()) diverged(cmd, "sampling_failure but no color has k occurrences");
    } else if (want.witnesses.empty() ? got.found() : !agrees(got, want)) {
      diverged(cmd, "expected " + std::to_string(want.witnesses.size()) + " witnesses");
    }
  }
  return result;
}

}  // namespace rfq::cli
