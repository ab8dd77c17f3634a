// Copyright 2026 The WERd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "werd/editdist.hpp"
#include "werd/mining_config.hpp"
#include "werd/textnorm.hpp"

namespace werd {

/// A mined spelling-variant pair. `target` is the frequent form, `source` the
/// rare one; `score` is their normalized edit distance.
struct VariantPair {
  Phrase target;
  Phrase source;
  std::uint64_t target_count = 1;
  std::uint64_t source_count = 1;
  double score = 0.0;

  friend bool operator==(const VariantPair&, const VariantPair&) = default;
};

/// Throws std::invalid_argument if target == source, a count is zero, or the
/// score is not a finite positive number.
void validate(const VariantPair& pair);

/// Metadata carried alongside a table (persisted as a JSON sidecar).
struct TableMeta {
  std::optional<MiningConfig> mining;
  std::optional<NormalizationConfig> normalization;
  std::optional<double> max_ed;

  friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

/// Immutable, indexed collection of variant pairs. Pairs are kept sorted by
/// (target, source); each unordered phrase pair appears at most once and is
/// reachable from both of its phrases.
class VariantTable {
 public:
  VariantTable() = default;
  explicit VariantTable(std::vector<VariantPair> pairs, TableMeta meta = {});

  const std::vector<VariantPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const TableMeta& meta() const noexcept { return meta_; }

  /// The pair matching {a, b} in either orientation, or null.
  const VariantPair* find(std::string_view a, std::string_view b) const;
  /// True iff some pair has `joined` on either side.
  bool contains_phrase(std::string_view joined) const;
  /// Indices into pairs() of every pair with `joined` on either side.
  std::span<const std::size_t> pairs_with(std::string_view joined) const;

  friend bool operator==(const VariantTable& a, const VariantTable& b) { return a.pairs_ == b.pairs_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  static std::string pair_key(std::string_view a, std::string_view b);

  std::vector<VariantPair> pairs_;
  TableMeta meta_;
  std::unordered_map<std::string, std::vector<std::size_t>, Hash, std::equal_to<>> phrase_index_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> pair_index_;
};

/// Symmetric lookup: the score of {a, b} if listed, otherwise nullopt.
std::optional<double> lookup_pair(const VariantTable& table, const Phrase& a, const Phrase& b);

/// Decimal with at most `max_decimals` digits after the point, trailing
/// zeros trimmed.
std::string format_decimal(double value, int max_decimals);

/// Scores print with at most four decimals.
inline std::string format_score(double score) { return format_decimal(score, 4); }

/// TSV: `target\tsource\ttarget_count\tsource_count\tscore`, one pair per line.
void write_table(std::ostream& out, const VariantTable& table);
VariantTable read_table(std::istream& in, const std::string& source, TableMeta meta = {});
void save(const VariantTable& table, const std::filesystem::path& path);
/// Loads the TSV and, when present, its `.meta.json` sidecar.
VariantTable load(const std::filesystem::path& path);

std::filesystem::path meta_path(const std::filesystem::path& table_path);
void save_meta(const TableMeta& meta, const std::filesystem::path& path);
std::optional<TableMeta> load_meta(const std::filesystem::path& path);

/// Pairs with score <= max_ed.
VariantTable filter(const VariantTable& table, double max_ed);

enum class VariantClass { kSplitting, kMerging, kSubstitution };

std::string_view to_string(VariantClass cls);

/// Direction is rare -> frequent: fewer source tokens than target tokens is a
/// split, more is a merge, equal is a substitution.
VariantClass classify(const VariantPair& pair);

struct ClassHistogram {
  std::size_t total = 0;
  std::size_t splitting = 0;
  std::size_t merging = 0;
  std::size_t substitution = 0;

  double percent(VariantClass cls) const;
};

/// Throws std::invalid_argument on an empty table.
ClassHistogram class_histogram(const VariantTable& table);

/// One VARIANT operation observed in a segment alignment.
struct VariantMatch {
  std::string segment_id;
  Phrase hyp;
  Phrase ref;
  double score = 0.0;

  friend bool operator==(const VariantMatch&, const VariantMatch&) = default;
};

/// Seeded uniform sample of k matches, kept in input order; all of them when
/// there are fewer than k.
std::vector<VariantMatch> sample_matches(std::span<const VariantMatch> matches, std::size_t k,
                                         std::uint64_t seed);

}  // namespace werd
