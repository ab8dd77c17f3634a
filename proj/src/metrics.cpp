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

#include "werd/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "werd/error.hpp"

namespace werd {

Metric parse_metric(std::string_view name) {
  if (name == "wer") return Metric::kWer;
  if (name == "werd") return Metric::kWerd;
  if (name == "ter") return Metric::kTer;
  if (name == "mrwer") return Metric::kMrWer;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "' (expected wer|werd|ter|mrwer)");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kWer:
      return "wer";
    case Metric::kWerd:
      return "werd";
    case Metric::kTer:
      return "ter";
    case Metric::kMrWer:
      return "mrwer";
  }
  return "?";
}

OpCounts ScoreReport::total_counts() const {
  OpCounts total;
  for (const SegmentScore& s : segments) {
    total.match += s.counts.match;
    total.sub += s.counts.sub;
    total.ins += s.counts.ins;
    total.del += s.counts.del;
    total.variant += s.counts.variant;
  }
  return total;
}

std::size_t ScoreReport::variant_matches() const { return total_counts().variant; }

void summarize(ScoreReport& report) {
  report.total_cost = 0.0;
  report.total_ref_len = 0;
  report.empty_refs = 0;
  for (const SegmentScore& s : report.segments) {
    report.total_cost += s.cost;
    report.total_ref_len += s.ref_len;
    if (s.empty_ref) ++report.empty_refs;
  }
  if (report.total_ref_len > 0)
    report.value = 100.0 * report.total_cost / static_cast<double>(report.total_ref_len);
  else
    report.value = report.total_cost > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  for (unsigned j = 0; j < jobs; ++j) {
    threads.emplace_back([&, j] {
      for (std::size_t i = j; i < count; i += jobs) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

std::string list_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

using SegmentIndex = std::unordered_map<std::string_view, const Segment*>;

SegmentIndex index_segments(std::span<const Segment> segments) {
  SegmentIndex index;
  for (const Segment& s : segments)
    if (!index.emplace(s.id, &s).second) throw DataError("duplicate segment id '" + s.id + "'");
  return index;
}

// Hypothesis ids paired with their references, sorted by id.
std::vector<std::pair<const Segment*, const Segment*>> pair_by_id(std::span<const Segment> hyps,
                                                                  std::span<const Segment> refs) {
  const SegmentIndex ref_index = index_segments(refs);
  const SegmentIndex hyp_index = index_segments(hyps);
  std::vector<std::string> missing_ref, missing_hyp;
  std::vector<std::pair<const Segment*, const Segment*>> pairs;
  for (const Segment& h : hyps) {
    auto it = ref_index.find(h.id);
    if (it == ref_index.end())
      missing_ref.push_back(h.id);
    else
      pairs.emplace_back(&h, it->second);
  }
  for (const Segment& r : refs)
    if (!hyp_index.contains(r.id)) missing_hyp.push_back(r.id);
  if (!missing_ref.empty()) throw DataError("hypothesis ids without a reference: " + list_ids(missing_ref));
  if (!missing_hyp.empty()) throw DataError("reference ids without a hypothesis: " + list_ids(missing_hyp));
  if (pairs.empty()) throw DataError("no segments to score");
  std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.first->id < y.first->id; });
  return pairs;
}

void fill_segment(SegmentScore& s, Alignment alignment, Tokens hyp, const Tokens& ref) {
  s.counts = alignment.counts;
  s.shifts = alignment.shifts;
  s.cost = alignment.total_cost;
  s.ref_len = ref.size();
  s.empty_ref = ref.empty() && !hyp.empty();
  for (const EditOp& op : alignment.ops) {
    if (op.kind != OpKind::kVariant) continue;
    auto words = [](const Tokens& t, Span sp) {
      return Phrase(Tokens(t.begin() + static_cast<std::ptrdiff_t>(sp.begin), t.begin() + static_cast<std::ptrdiff_t>(sp.end)));
    };
    s.matches.push_back({s.id, words(hyp, op.hyp), words(ref, op.ref), op.cost});
  }
  s.alignment = std::move(alignment);
  s.hyp = std::move(hyp);
  s.ref = ref;
}

}  // namespace

ScoreReport score_corpus(std::span<const Segment> hyps, std::span<const Segment> refs, const MetricSpec& spec) {
  if (spec.metric == Metric::kMrWer) {
    const std::vector<Segment> one(refs.begin(), refs.end());
    return mr_wer(hyps, std::span<const std::vector<Segment>>(&one, 1), spec.jobs);
  }
  if (spec.metric == Metric::kWerd && spec.table == nullptr)
    throw std::invalid_argument("werd scoring needs a variant table");

  const auto pairs = pair_by_id(hyps, refs);
  ScoreReport report;
  report.metric = std::string(to_string(spec.metric));
  report.segments.resize(pairs.size());
  parallel_for(pairs.size(), spec.jobs, [&](std::size_t i) {
    const Segment& h = *pairs[i].first;
    const Segment& r = *pairs[i].second;
    SegmentScore& s = report.segments[i];
    s.id = h.id;
    switch (spec.metric) {
      case Metric::kWer:
        fill_segment(s, wer_align(h.tokens, r.tokens), h.tokens, r.tokens);
        break;
      case Metric::kWerd:
        fill_segment(s, werd_align(h.tokens, r.tokens, *spec.table, spec.cost), h.tokens, r.tokens);
        break;
      case Metric::kTer: {
        TerAlignment ter = ter_align(h.tokens, r.tokens);
        fill_segment(s, std::move(ter.alignment), std::move(ter.shifted_hyp), r.tokens);
        break;
      }
      case Metric::kMrWer:
        break;
    }
  });
  if (spec.metric == Metric::kWerd) {
    report.config["cost_mode"] = spec.cost.to_string();
    report.config["table_pairs"] = std::to_string(spec.table->size());
    if (spec.table->meta().max_ed) report.config["max_ed"] = format_score(*spec.table->meta().max_ed);
  }
  summarize(report);
  return report;
}

ScoreReport mr_wer(std::span<const Segment> hyps, std::span<const std::vector<Segment>> ref_sets, unsigned jobs) {
  if (ref_sets.empty()) throw std::invalid_argument("mr_wer needs at least one reference set");
  std::vector<SegmentIndex> indexes;
  for (const auto& set : ref_sets) indexes.push_back(index_segments(set));
  const SegmentIndex hyp_index = index_segments(hyps);

  std::vector<std::string> no_ref, no_hyp;
  for (const Segment& h : hyps) {
    const bool any = std::any_of(indexes.begin(), indexes.end(), [&](const SegmentIndex& ix) { return ix.contains(h.id); });
    if (!any) no_ref.push_back(h.id);
  }
  for (const auto& set : ref_sets)
    for (const Segment& r : set)
      if (!hyp_index.contains(r.id)) no_hyp.push_back(r.id);
  if (!no_ref.empty()) throw DataError("hypothesis ids with zero references: " + list_ids(no_ref));
  if (!no_hyp.empty()) throw DataError("reference ids without a hypothesis: " + list_ids(no_hyp));
  if (hyps.empty()) throw DataError("no segments to score");

  std::vector<const Segment*> order;
  for (const Segment& h : hyps) order.push_back(&h);
  std::sort(order.begin(), order.end(), [](const Segment* x, const Segment* y) { return x->id < y->id; });

  ScoreReport report;
  report.metric = "mrwer";
  report.segments.resize(order.size());
  parallel_for(order.size(), jobs, [&](std::size_t i) {
    const Segment& h = *order[i];
    std::optional<Alignment> best;
    std::size_t best_ref = 0;
    for (std::size_t k = 0; k < indexes.size(); ++k) {
      auto it = indexes[k].find(h.id);
      if (it == indexes[k].end()) continue;
      Alignment a = wer_align(h.tokens, it->second->tokens);
      const bool better = !best || a.counts.errors() < best->counts.errors() ||
                          (a.counts.errors() == best->counts.errors() && a.ref_len < best->ref_len);
      if (better) {
        best = std::move(a);
        best_ref = k;
      }
    }
    SegmentScore& s = report.segments[i];
    s.id = h.id;
    s.chosen_ref = best_ref;
    fill_segment(s, std::move(*best), h.tokens, indexes[best_ref].at(h.id)->tokens);
  });
  report.config["references"] = std::to_string(ref_sets.size());
  summarize(report);
  return report;
}

double pairwise_overlap(std::span<const Segment> ref_a, std::span<const Segment> ref_b) {
  const auto pairs = pair_by_id(ref_a, ref_b);
  std::size_t edits = 0, denom = 0;
  for (const auto& [a, b] : pairs) {
    edits += wer_align(a->tokens, b->tokens).counts.errors();
    denom += std::max(a->tokens.size(), b->tokens.size());
  }
  if (denom == 0) return 100.0;
  return 100.0 * (1.0 - static_cast<double>(edits) / static_cast<double>(denom));
}

CorrelationResult pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: series differ in length");
  if (a.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const auto n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a, db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  CorrelationResult result;
  result.n = a.size();
  if (saa > 0.0 && sbb > 0.0) result.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return result;
}

CorrelationResult pearson(const std::vector<std::pair<std::string, double>>& a,
                          const std::vector<std::pair<std::string, double>>& b) {
  std::unordered_map<std::string_view, double> b_by_id;
  for (const auto& [id, v] : b)
    if (!b_by_id.emplace(id, v).second) throw DataError("duplicate segment id '" + id + "'");
  if (a.size() != b.size()) throw DataError("correlation inputs cover different segments");
  std::vector<std::pair<std::string, double>> sorted_a = a;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::vector<double> xs, ys;
  for (const auto& [id, v] : sorted_a) {
    auto it = b_by_id.find(id);
    if (it == b_by_id.end()) throw DataError("segment '" + id + "' missing from second input");
    xs.push_back(v);
    ys.push_back(it->second);
  }
  return pearson(xs, ys);
}

std::vector<SweepPoint> threshold_sweep(std::span<const Segment> hyps, std::span<const Segment> refs,
                                        const VariantTable& table, std::span<const double> thresholds,
                                        CostMode cost, unsigned jobs) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw std::invalid_argument("sweep thresholds must be ascending");
  std::vector<SweepPoint> points;
  for (double t : thresholds) {
    const VariantTable sub = filter(table, t);
    MetricSpec spec{Metric::kWerd, &sub, cost, jobs};
    SweepPoint point;
    point.threshold = t;
    point.table_pairs = sub.size();
    point.report = score_corpus(hyps, refs, spec);
    point.variant_matches = point.report.variant_matches();
    points.push_back(std::move(point));
  }
  return points;
}

std::vector<VariantMatch> collect_matches(const ScoreReport& report) {
  std::vector<VariantMatch> out;
  for (const SegmentScore& s : report.segments) out.insert(out.end(), s.matches.begin(), s.matches.end());
  return out;
}

void write_report(std::ostream& out, const ScoreReport& report) {
  out << "# config\tmetric=" << report.metric;
  for (const auto& [k, v] : report.config) out << '\t' << k << '=' << v;
  out << '\n';
  for (const SegmentScore& s : report.segments) {
    out << s.id << '\t' << format_decimal(s.cost, 6) << '\t' << s.ref_len << '\t' << s.counts.ins << '\t'
        << s.counts.del << '\t' << s.counts.sub << '\t' << s.counts.variant << '\n';
  }
  const OpCounts c = report.total_counts();
  out << "# corpus\t" << report.metric << '=' << format_decimal(report.value, 4)
      << "\tcost=" << format_decimal(report.total_cost, 6) << "\tref_len=" << report.total_ref_len
      << "\tsegments=" << report.segments.size() << "\tins=" << c.ins << "\tdel=" << c.del << "\tsub=" << c.sub
      << "\tvariant_matches=" << c.variant << "\tempty_refs=" << report.empty_refs << '\n';
}

namespace {

template <typename T>
bool parse_field(std::string_view text, T& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<ReportRow> read_report(std::istream& in, const std::string& source) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const std::size_t tab = rest.find('\t');
      f.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (f.size() != 7) throw DataError(source, line_no, "expected 7 tab-separated fields");
    ReportRow row;
    row.id = std::string(f[0]);
    if (!parse_field(f[1], row.cost) || !parse_field(f[2], row.ref_len) || !parse_field(f[3], row.ins) ||
        !parse_field(f[4], row.del) || !parse_field(f[5], row.sub) || !parse_field(f[6], row.variant_matches))
      throw DataError(source, line_no, "bad numeric field");
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw DataError(source, line_no, "read failure");
  return rows;
}

std::vector<std::pair<std::string, double>> segment_rates(std::span<const ReportRow> rows) {
  std::vector<std::pair<std::string, double>> out;
  for (const ReportRow& r : rows)
    if (r.ref_len > 0) out.emplace_back(r.id, 100.0 * r.cost / static_cast<double>(r.ref_len));
  return out;
}

}  // namespace werd
