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

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "werd/align.hpp"
#include "werd/textnorm.hpp"
#include "werd/variants.hpp"

namespace werd {

enum class Metric { kWer, kWerd, kTer, kMrWer };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

struct MetricSpec {
  Metric metric = Metric::kWer;
  const VariantTable* table = nullptr;  // required for kWerd
  CostMode cost = CostMode::table();
  unsigned jobs = 1;
};

struct SegmentScore {
  std::string id;
  double cost = 0.0;
  std::size_t ref_len = 0;
  OpCounts counts;
  std::size_t shifts = 0;
  /// Set when the reference is empty but the hypothesis is not.
  bool empty_ref = false;
  /// Index of the reference chosen by MR-WER (0 otherwise).
  std::size_t chosen_ref = 0;
  Alignment alignment;
  Tokens hyp;  // as aligned (after shifts, for TER)
  Tokens ref;
  std::vector<VariantMatch> matches;
};

/// Per-segment results (sorted by id) and the corpus value
/// 100 * sum(cost) / sum(ref_len).
struct ScoreReport {
  std::string metric;
  std::vector<SegmentScore> segments;
  double total_cost = 0.0;
  std::size_t total_ref_len = 0;
  double value = 0.0;
  std::size_t empty_refs = 0;
  /// Echo of the scoring configuration, written into exported reports.
  std::map<std::string, std::string> config;

  OpCounts total_counts() const;
  std::size_t variant_matches() const;
};

/// Recomputes the corpus totals and value from `report.segments`. An empty
/// denominator yields 0 when there are no errors, +inf otherwise.
void summarize(ScoreReport& report);

/// Aligns each hypothesis with the reference of the same id. Throws DataError
/// when the id sets differ (listing the orphans) or are empty.
ScoreReport score_corpus(std::span<const Segment> hyps, std::span<const Segment> refs, const MetricSpec& spec);

/// Multi-reference WER with per-segment oracle reference selection: the
/// reference with the fewest edits, then the shortest, then the earliest.
/// `ref_sets[k]` is the k-th reference file; an id may be missing from some
/// of them but not from all.
ScoreReport mr_wer(std::span<const Segment> hyps, std::span<const std::vector<Segment>> ref_sets,
                   unsigned jobs = 1);

/// 100 * (1 - sum(edits(a, b)) / sum(max(|a|, |b|))) over matching ids.
double pairwise_overlap(std::span<const Segment> ref_a, std::span<const Segment> ref_b);

struct CorrelationResult {
  std::string name_a;
  std::string name_b;
  std::size_t n = 0;
  /// Empty when either series has zero variance.
  std::optional<double> r;
};

/// Pearson correlation of paired values (two-pass). Throws
/// std::invalid_argument if the sizes differ or n < 2.
CorrelationResult pearson(std::span<const double> a, std::span<const double> b);

/// Pairs values by id first; throws DataError when the id sets differ.
CorrelationResult pearson(const std::vector<std::pair<std::string, double>>& a,
                          const std::vector<std::pair<std::string, double>>& b);

struct SweepPoint {
  double threshold = 0.0;
  std::size_t table_pairs = 0;
  std::size_t variant_matches = 0;
  ScoreReport report;
};

/// WERd at each threshold over `table` filtered to score <= threshold.
/// Thresholds must be ascending.
std::vector<SweepPoint> threshold_sweep(std::span<const Segment> hyps, std::span<const Segment> refs,
                                        const VariantTable& table, std::span<const double> thresholds,
                                        CostMode cost = CostMode::table(), unsigned jobs = 1);

/// Every VARIANT operation in the report, in segment order.
std::vector<VariantMatch> collect_matches(const ScoreReport& report);

/// `segment_id\tcost\tref_len\tins\tdel\tsub\tvariant_matches` rows after a
/// `# config` comment, closed by a `# corpus` summary comment.
void write_report(std::ostream& out, const ScoreReport& report);

struct ReportRow {
  std::string id;
  double cost = 0.0;
  std::size_t ref_len = 0;
  std::size_t ins = 0;
  std::size_t del = 0;
  std::size_t sub = 0;
  std::size_t variant_matches = 0;
};

/// Parses an exported report, skipping `#` comment lines.
std::vector<ReportRow> read_report(std::istream& in, const std::string& source);

/// Per-segment error rates 100 * cost / ref_len keyed by id; rows with an
/// empty reference are skipped.
std::vector<std::pair<std::string, double>> segment_rates(std::span<const ReportRow> rows);

}  // namespace werd
