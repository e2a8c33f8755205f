#include "rfq/oracle.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rfq/edit_ops.hpp"

namespace rfq {

void ReferenceArray::set(std::size_t rank, ColorId c) { values_.at(rank) = c; }

void ReferenceArray::insert(std::size_t rank, ColorId c) {
  if (rank > values_.size()) throw std::out_of_range("reference insert: rank out of range");
  values_.insert(values_.begin() + static_cast<std::ptrdiff_t>(rank), c);
}

void ReferenceArray::erase(std::size_t rank) {
  if (rank >= values_.size()) throw std::out_of_range("reference erase: rank out of range");
  values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(rank));
}

bool OracleAnswer::accepts(ColorId c) const {
  return std::binary_search(witnesses.begin(), witnesses.end(), c);
}

namespace {

using Counts = std::unordered_map<ColorId, std::size_t>;

Counts range_counts(const ReferenceArray& a, std::size_t l, std::size_t r) {
  if (l > r || r >= a.size()) throw std::out_of_range("oracle: invalid range");
  Counts counts;
  for (std::size_t i = l; i <= r; ++i) ++counts[a.values()[i]];
  return counts;
}

// Colors whose count satisfies `better` against every other, by extremum.
template <typename Better>
OracleAnswer extremum(const Counts& counts, Better better) {
  OracleAnswer out;
  bool first = true;
  for (const auto& [c, f] : counts) {
    if (first || better(f, out.frequency)) {
      out.frequency = f;
      out.witnesses.assign(1, c);
      first = false;
    } else if (f == out.frequency) {
      out.witnesses.push_back(c);
    }
  }
  std::sort(out.witnesses.begin(), out.witnesses.end());
  return out;
}

}  // namespace

OracleAnswer oracle_mode(const ReferenceArray& a, std::size_t l, std::size_t r) {
  return extremum(range_counts(a, l, r), [](std::size_t x, std::size_t y) { return x > y; });
}

OracleAnswer oracle_lfz(const ReferenceArray& a, std::size_t l, std::size_t r) {
  Counts counts = range_counts(a, l, r);
  for (const ColorId c : a.values()) counts.try_emplace(c, 0);
  return extremum(counts, [](std::size_t x, std::size_t y) { return x < y; });
}

OracleAnswer oracle_lfp(const ReferenceArray& a, std::size_t l, std::size_t r) {
  return extremum(range_counts(a, l, r), [](std::size_t x, std::size_t y) { return x < y; });
}

OracleAnswer oracle_kfreq(const ReferenceArray& a, std::size_t l, std::size_t r, std::size_t k) {
  OracleAnswer out;
  out.frequency = k;
  for (const auto& [c, f] : range_counts(a, l, r)) {
    if (f == k) out.witnesses.push_back(c);
  }
  std::sort(out.witnesses.begin(), out.witnesses.end());
  return out;
}

std::size_t oracle_countf(const ReferenceArray& a, std::size_t l, std::size_t r, std::size_t k,
                          Relation relation) {
  std::size_t total = 0;
  for (const auto& [c, f] : range_counts(a, l, r)) {
    switch (relation) {
      case Relation::below:
        total += f < k ? 1 : 0;
        break;
      case Relation::at:
        total += f == k ? 1 : 0;
        break;
      case Relation::above:
        total += f > k ? 1 : 0;
        break;
    }
  }
  return total;
}

std::string relation_name(Relation relation) {
  switch (relation) {
    case Relation::below:
      return "LT";
    case Relation::at:
      return "EQ";
    case Relation::above:
      return "GT";
  }
  return "?";
}

std::string format_answer(const QueryAnswer& answer) {
  switch (answer.status) {
    case Status::found:
      return "color=" + std::to_string(answer.color) + " freq=" + std::to_string(answer.frequency);
    case Status::none:
      return "none";
    case Status::sampling_failure:
      return "sampling_failure";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

class ViolationLog {
 public:
  explicit ViolationLog(std::size_t cap) : cap_(cap) {}
  template <typename... Parts>
  void add(const Parts&... parts) {
    ++count_;
    if (lines_.size() >= cap_) return;
    std::ostringstream os;
    (os << ... << parts);
    lines_.push_back(os.str());
  }
  std::vector<std::string> take() { return std::move(lines_); }
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t cap_;
  std::size_t count_ = 0;
  std::vector<std::string> lines_;
};

}  // namespace

std::vector<std::string> verify_structure(const RangeFrequencyIndex& index,
                                          std::size_t max_reports) {
  const BaseIndex& base = index.base();
  ViolationLog log(max_reports);
  const std::size_t segs = base.segment_count();
  const std::size_t width = base.segment_width();
  const std::size_t t = base.threshold();
  const std::size_t row = t + 1;

  // Slots, occupancy, and the occurrence lists with their back-references.
  std::size_t live = 0;
  std::vector<std::vector<std::uint32_t>> seg_counts(base.color_capacity());
  std::vector<std::size_t> totals(base.color_capacity(), 0);
  for (std::size_t s = 0; s < segs; ++s) {
    std::size_t occ = 0;
    bool gap = false;
    for (std::size_t idx = s * width; idx < (s + 1) * width; ++idx) {
      if (!base.is_live(idx)) {
        gap = true;
        continue;
      }
      if (gap) log.add("segment ", s, ": live slot ", idx, " after an empty slot");
      ++occ;
      const ColorIndex c = base.color_at(idx);
      if (c >= base.color_capacity() || !base.is_present(c)) {
        log.add("slot ", idx, ": color index ", c, " not registered");
        continue;
      }
      if (base.occurrences(c).at_handle(base.handle_at(idx)) != idx) {
        log.add("slot ", idx, ": handle does not point back to its occurrence entry");
      }
      auto& per_seg = seg_counts[c];
      if (per_seg.empty()) per_seg.assign(segs, 0);
      ++per_seg[s];
      ++totals[c];
    }
    live += occ;
    if (occ != base.segment_occupancy(s)) {
      log.add("segment ", s, ": occupancy ", base.segment_occupancy(s), " but ", occ, " live");
    }
    if (!RebuildPolicy::segment_ok(base, s)) log.add("segment ", s, ": occupancy out of bounds");
  }
  if (live != base.live_count()) log.add("live count ", base.live_count(), " but ", live, " slots");
  if (!RebuildPolicy::size_ok(base)) log.add("live count outside rebuild bounds");

  // Registry and frequency classes.
  std::size_t infrequent = 0;
  std::vector<ColorIndex> frequent;
  for (const auto& [value, c] : base.registry()) {
    if (base.color_value(c) != value) log.add("color ", value, ": registry slot maps back wrongly");
    const auto& occ = base.occurrences(c);
    if (occ.size() != totals[c]) {
      log.add("color ", value, ": ", occ.size(), " listed occurrences, ", totals[c], " in slots");
    }
    for (std::size_t k = 0; k < occ.size(); ++k) {
      if (k > 0 && occ[k - 1] >= occ[k]) log.add("color ", value, ": occurrences not increasing");
      if (occ[k] >= base.slot_count() || base.color_at(occ[k]) != c) {
        log.add("color ", value, ": occurrence ", occ[k], " holds a different color");
      }
    }
    const bool should_be_frequent = totals[c] > t;
    if (base.is_frequent(c) != should_be_frequent) log.add("color ", value, ": wrong frequent flag");
    if (should_be_frequent) {
      frequent.push_back(c);
    } else {
      ++infrequent;
    }
  }
  if (infrequent != base.infrequent_color_count()) log.add("infrequent color count mismatch");
  {
    std::vector<ColorIndex> listed(base.frequent_colors().begin(), base.frequent_colors().end());
    std::sort(listed.begin(), listed.end());
    std::sort(frequent.begin(), frequent.end());
    if (listed != frequent) log.add("frequent color list mismatch");
  }

  // Prefix counts of frequent colors.
  for (std::size_t j = 0; j <= segs; ++j) {
    const auto& map = base.frequent_prefix(j);
    if (map.size() != frequent.size()) log.add("endpoint ", j, ": prefix map has wrong key set");
    for (const ColorIndex c : frequent) {
      std::uint32_t expect = 0;
      for (std::size_t s = 0; s < j; ++s) expect += seg_counts[c][s];
      const auto it = map.find(c);
      if (it == map.end() || it->second != expect) {
        log.add("endpoint ", j, ", color ", base.color_value(c), ": prefix count wrong");
      }
    }
  }

  // Span histograms, interior histograms and interior sampler contents.
  std::vector<ColorIndex> light;
  for (const auto& [value, c] : base.registry()) {
    if (totals[c] >= 1 && totals[c] <= t) light.push_back(c);
  }
  const KFrequencyIndex& interior = index.interior();
  const auto& family = interior.family();
  std::vector<std::vector<std::uint8_t>> levels(light.size());
  for (std::size_t k = 0; k < light.size(); ++k) levels[k] = family->levels(base.color_value(light[k]));

  std::vector<std::vector<std::uint32_t>> prefix(light.size());
  for (std::size_t k = 0; k < light.size(); ++k) {
    const auto& per_seg = seg_counts[light[k]];
    prefix[k].assign(segs + 1, 0);
    for (std::size_t s = 0; s < segs; ++s) prefix[k][s + 1] = prefix[k][s] + per_seg[s];
  }

  std::vector<std::uint32_t> span_hist(row);
  std::vector<std::uint32_t> inner_hist(row);
  std::vector<std::vector<std::size_t>> members(row);
  for (std::size_t j1 = 0; j1 < segs; ++j1) {
    for (std::size_t j2 = j1 + 1; j2 <= segs; ++j2) {
      std::fill(span_hist.begin(), span_hist.end(), 0);
      std::fill(inner_hist.begin(), inner_hist.end(), 0);
      for (auto& m : members) m.clear();
      for (std::size_t k = 0; k < light.size(); ++k) {
        const auto& per_seg = seg_counts[light[k]];
        const std::size_t f = prefix[k][j2] - prefix[k][j1];
        ++span_hist[f];
        const bool left_clear = j1 == 0 || per_seg[j1 - 1] == 0;
        const bool right_clear = j2 == segs || per_seg[j2] == 0;
        if (f >= 1 && left_clear && right_clear) {
          ++inner_hist[f];
          members[f].push_back(k);
        }
      }
      const std::size_t pair = base.pair_index(j1, j2);
      const auto got_span = base.histogram_row(pair);
      const auto got_inner = interior.interior_histogram(pair);
      for (std::size_t f = 0; f < row; ++f) {
        if (got_span[f] != span_hist[f]) {
          log.add("span (", j1, ",", j2, ") histogram[", f, "] = ", got_span[f], ", expected ",
                  span_hist[f]);
        }
        if (got_inner[f] != inner_hist[f]) {
          log.add("span (", j1, ",", j2, ") interior[", f, "] = ", got_inner[f], ", expected ",
                  inner_hist[f]);
        }
        if (got_inner[f] > got_span[f] && f >= 1) {
          log.add("span (", j1, ",", j2, ") interior[", f, "] exceeds histogram");
        }
        const Sampler* sampler = interior.sampler(pair, f);
        const std::size_t live_in_cell = sampler ? sampler->live_count() : 0;
        if (live_in_cell != inner_hist[f]) {
          log.add("span (", j1, ",", j2, ") sampler[", f, "] holds ", live_in_cell, ", expected ",
                  inner_hist[f]);
        } else if (sampler != nullptr) {
          Sampler fresh(family);
          for (const std::size_t k : members[f]) fresh.insert(base.color_value(light[k]), levels[k]);
          if (!fresh.same_state(*sampler)) {
            log.add("span (", j1, ",", j2, ") sampler[", f, "] state differs from its color set");
          }
        }
      }
    }
  }

  // Tight-span lists.
  const LeastFrequentIndex& tight = index.tight_spans();
  if (tight.listed_colors() != light.size()) {
    log.add("tight-span lists hold ", tight.listed_colors(), " colors, expected ", light.size());
  }
  for (const ColorIndex c : light) {
    const auto& per_seg = seg_counts[c];
    std::size_t first = 0;
    while (per_seg[first] == 0) ++first;
    std::size_t last = segs - 1;
    while (per_seg[last] == 0) --last;
    const auto cell = tight.cell_of(c);
    if (!cell || cell->pair != base.pair_index(first, last + 1) || cell->frequency != totals[c]) {
      log.add("color ", base.color_value(c), ": filed under the wrong tight span");
      continue;
    }
    const auto list = tight.cell(first, last + 1, totals[c]);
    if (std::find(list.begin(), list.end(), c) == list.end()) {
      log.add("color ", base.color_value(c), ": missing from its tight-span list");
    }
  }
  return log.take();
}

// ---------------------------------------------------------------------------

namespace {

class Driver {
 public:
  explicit Driver(const DiffConfig& config) : config_(config), rng_(config.seed) {}

  DiffReport run() {
    const std::size_t max_n = std::max<std::size_t>(config_.max_n, 2);
    const std::size_t n0 = uniform(std::max<std::size_t>(1, max_n / 4), max_n);
    colors_ = config_.colors;
    if (colors_ == 0) colors_ = coin(1, 2) ? uniform(2, 16) : uniform(std::max<std::size_t>(2, n0 / 2), n0);
    std::vector<ColorId> initial(n0);
    for (auto& c : initial) c = draw_color();
    ref_ = ReferenceArray(initial);
    index_ = std::make_unique<RangeFrequencyIndex>(initial, config_.params);
    report_.initial_size = n0;
    report_.colors = colors_;
    note("INIT n=", n0, " colors=", colors_, " seed=", config_.seed);

    for (std::size_t op = 0; op < config_.ops; ++op) {
      report_.ops_run = op + 1;
      if (coin(config_.update_percent, 100)) {
        update(op);
        ++report_.updates;
      } else {
        query(op);
        ++report_.queries;
      }
      if (config_.verify_every != 0 && (op + 1) % config_.verify_every == 0) {
        ++report_.structure_checks;
        const auto violations = verify_structure(*index_, 5);
        if (!violations.empty()) {
          report_.structure_violations += violations.size();
          fail(op, "structure: " + violations.front());
        }
      }
    }
    report_.passed = report_.divergences == 0 && report_.structure_violations == 0;
    return report_;
  }

 private:
  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(std::size_t num, std::size_t den) { return uniform(1, den) <= num; }
  ColorId draw_color() { return uniform(0, colors_ - 1); }

  template <typename... Parts>
  void note(const Parts&... parts) {
    if (!config_.keep_transcript) return;
    std::ostringstream os;
    (os << ... << parts);
    report_.transcript += os.str();
    report_.transcript += '\n';
  }

  void fail(std::size_t op, const std::string& what) {
    ++report_.divergences;
    if (!report_.first_divergence_op) {
      report_.first_divergence_op = op;
      report_.first_divergence = "op " + std::to_string(op) + ": " + what;
    }
    note("DIVERGENCE ", what);
  }

  void update(std::size_t op) {
    const std::size_t n = ref_.size();
    const std::size_t max_n = std::max<std::size_t>(config_.max_n, 2);
    std::size_t kind = uniform(0, 2);
    if (kind == 1 && n >= max_n) kind = 2;
    if (kind == 2 && n <= 1) kind = 1;
    if (config_.adversarial && target_) {
      // Remove an occurrence of the color the sampler just handed out.
      const auto& v = ref_.values();
      const auto it = std::find(v.begin(), v.end(), *target_);
      target_.reset();
      if (it != v.end() && n > 1) {
        const auto rank = static_cast<std::size_t>(it - v.begin());
        note("DEL ", rank);
        ref_.erase(rank);
        index_->erase(rank);
        return;
      }
    }
    if (kind == 0) {
      const std::size_t rank = uniform(0, n - 1);
      const ColorId c = draw_color();
      note("SET ", rank, ' ', c);
      ref_.set(rank, c);
      index_->set(rank, c);
    } else if (kind == 1) {
      const std::size_t rank = uniform(0, n);
      const ColorId c = draw_color();
      note("INS ", rank, ' ', c);
      ref_.insert(rank, c);
      index_->insert(rank, c);
    } else {
      const std::size_t rank = uniform(0, n - 1);
      note("DEL ", rank);
      ref_.erase(rank);
      index_->erase(rank);
    }
    if (index_->size() != ref_.size()) fail(op, "size mismatch after update");
  }

  std::pair<std::size_t, std::size_t> draw_range() {
    const std::size_t n = ref_.size();
    const std::size_t shape = uniform(0, 3);
    std::size_t l;
    std::size_t r;
    if (shape == 0) {
      const std::size_t len = uniform(1, std::min<std::size_t>(n, 64));
      l = uniform(0, n - len);
      r = l + len - 1;
    } else if (shape == 1) {
      l = uniform(0, n / 10);
      r = uniform(n - 1 - n / 10, n - 1);
    } else {
      l = uniform(0, n - 1);
      r = uniform(0, n - 1);
      if (l > r) std::swap(l, r);
    }
    return {l, r};
  }

  std::size_t draw_k(std::size_t l, std::size_t r) {
    // Half the time take the in-range count of some element, so that the
    // answer exists; otherwise any value up to the range length + 1.
    if (coin(1, 2)) {
      const ColorId c = ref_.values()[uniform(l, r)];
      std::size_t k = 0;
      for (std::size_t i = l; i <= r; ++i) k += ref_.values()[i] == c ? 1 : 0;
      return k;
    }
    return uniform(1, r - l + 2);
  }

  void check(std::size_t op, const std::string& cmd, const QueryAnswer& got,
             const OracleAnswer& want) {
    note(cmd, " -> ", format_answer(got));
    if (!got.found() || got.frequency != want.frequency || !want.accepts(got.color)) {
      fail(op, cmd + " -> " + format_answer(got) + ", expected freq=" +
                   std::to_string(want.frequency));
    }
  }

  void query(std::size_t op) {
    const auto [l, r] = draw_range();
    const std::string range = std::to_string(l) + ' ' + std::to_string(r);
    switch (uniform(0, 4)) {
      case 0:
        check(op, "MODE " + range, index_->mode(l, r), oracle_mode(ref_, l, r));
        break;
      case 1:
        check(op, "LFZ " + range, index_->least_frequent_zero(l, r), oracle_lfz(ref_, l, r));
        break;
      case 2:
        check(op, "LFP " + range, index_->least_frequent_present(l, r), oracle_lfp(ref_, l, r));
        break;
      case 3: {
        const std::size_t k = draw_k(l, r);
        const std::string cmd = "KFREQ " + range + ' ' + std::to_string(k);
        const QueryAnswer got = index_->k_frequency(l, r, k);
        const OracleAnswer want = oracle_kfreq(ref_, l, r, k);
        note(cmd, " -> ", format_answer(got));
        if (got.status == Status::sampling_failure) {
          ++report_.sampling_failures;
          if (want.witnesses.empty()) fail(op, cmd + " -> sampling_failure with no color at k");
        } else if (want.witnesses.empty() != !got.found() ||
                   (got.found() && (got.frequency != k || !want.accepts(got.color)))) {
          fail(op, cmd + " -> " + format_answer(got) + ", expected " +
                       std::to_string(want.witnesses.size()) + " witnesses");
        }
        if (got.found()) target_ = got.color;
        break;
      }
      default: {
        const std::size_t k = draw_k(l, r);
        const auto relation = static_cast<Relation>(uniform(0, 2));
        const std::string cmd =
            "COUNTF " + range + ' ' + std::to_string(k) + ' ' + relation_name(relation);
        const std::size_t got = index_->count_with_frequency(l, r, k, relation);
        const std::size_t want = oracle_countf(ref_, l, r, k, relation);
        note(cmd, " -> count=", got);
        if (got != want) {
          fail(op, cmd + " -> count=" + std::to_string(got) + ", expected " + std::to_string(want));
        }
      }
    }
  }

  DiffConfig config_;
  std::mt19937_64 rng_;
  std::size_t colors_ = 0;
  ReferenceArray ref_;
  std::unique_ptr<RangeFrequencyIndex> index_;
  std::optional<ColorId> target_;
  DiffReport report_;
};

}  // namespace

DiffReport differential_run(const DiffConfig& config) { return Driver(config).run(); }

}  // namespace rfq
