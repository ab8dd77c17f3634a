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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "werd/error.hpp"
#include "werd/metrics.hpp"
#include "werd/segment_io.hpp"

using namespace werd;

namespace {

const std::string kFixtures = WERD_FIXTURE_DIR;

Segment seg(const std::string& id, const std::string& text) {
  std::istringstream in(text);
  Tokens t;
  for (std::string w; in >> w;) t.push_back(w);
  return Segment{id, t};
}

std::vector<Segment> fixture(const char* name) {
  return read_segments(kFixtures + "/example/" + name, NormalizationConfig{});
}

const std::vector<std::string> kVocab = {"a", "b", "c", "d", "e", "f"};

std::vector<Segment> random_corpus(std::mt19937& rng, std::size_t n, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len), word(0, kVocab.size() - 1);
  std::vector<Segment> out;
  for (std::size_t i = 0; i < n; ++i) {
    Tokens t(len(rng));
    for (auto& w : t) w = kVocab[word(rng)];
    out.push_back({"s" + std::to_string(i), t});
  }
  return out;
}

VariantTable random_table(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> plen(1, 2), word(0, kVocab.size() - 1);
  std::uniform_int_distribution<int> score(1, 10000);
  std::vector<VariantPair> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t tries = 0; pairs.size() < n && tries < 1000; ++tries) {
    Tokens a(plen(rng)), b(plen(rng));
    for (auto& w : a) w = kVocab[word(rng)];
    for (auto& w : b) w = kVocab[word(rng)];
    if (a == b) continue;
    Phrase pa(a), pb(b);
    auto key = std::minmax(pa.joined(), pb.joined());
    if (!seen.emplace(key.first, key.second).second) continue;
    pairs.push_back({pa, pb, 3, 1, score(rng) / 1e4});
  }
  return VariantTable(std::move(pairs));
}

// Covariance written out directly, one pass per moment.
double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx * vy);
}

}  // namespace

TEST_CASE("worked example corpus scores") {
  const auto hyp = fixture("hyp.tsv"), ref = fixture("ref.tsv");
  const VariantTable table = load(kFixtures + "/example/variants.tsv");

  const ScoreReport wer = score_corpus(hyp, ref, {Metric::kWer});
  CHECK(wer.value == doctest::Approx(61.54).epsilon(1e-4));
  CHECK(wer.total_ref_len == 13);

  const ScoreReport zero = score_corpus(hyp, ref, {Metric::kWerd, &table, CostMode::zero()});
  CHECK(zero.value == doctest::Approx(30.77).epsilon(1e-4));
  CHECK(zero.variant_matches() == 3);
  CHECK(collect_matches(zero).size() == 3);

  const ScoreReport scored = score_corpus(hyp, ref, {Metric::kWerd, &table});
  CHECK(scored.value > zero.value);
  CHECK(scored.value < wer.value);

  CHECK_THROWS_AS(score_corpus(hyp, ref, {Metric::kWerd}), std::invalid_argument);
}

TEST_CASE("id sets must agree") {
  const std::vector<Segment> hyp = {seg("a", "x y"), seg("b", "z")};
  CHECK_THROWS_AS(score_corpus(hyp, std::vector<Segment>{seg("a", "x y")}, {Metric::kWer}), DataError);
  CHECK_THROWS_AS(score_corpus(std::vector<Segment>{seg("a", "x y")}, hyp, {Metric::kWer}), DataError);
  CHECK_THROWS_AS(score_corpus(std::vector<Segment>{}, std::vector<Segment>{}, {Metric::kWer}), DataError);
  const std::vector<Segment> dup = {seg("a", "x"), seg("a", "y")};
  CHECK_THROWS_AS(score_corpus(dup, dup, {Metric::kWer}), DataError);
}

TEST_CASE("empty references") {
  const ScoreReport r = score_corpus(std::vector<Segment>{seg("a", "x y"), seg("b", "p")},
                                     std::vector<Segment>{seg("a", ""), seg("b", "p")}, {Metric::kWer});
  CHECK(r.empty_refs == 1);
  CHECK(r.total_cost == 2.0);
  CHECK(r.value == 200.0);

  const ScoreReport all_empty = score_corpus(std::vector<Segment>{seg("a", "x")},
                                             std::vector<Segment>{seg("a", "")}, {Metric::kWer});
  CHECK(std::isinf(all_empty.value));
  const ScoreReport nothing = score_corpus(std::vector<Segment>{seg("a", "")},
                                           std::vector<Segment>{seg("a", "")}, {Metric::kWer});
  CHECK(nothing.value == 0.0);
}

TEST_CASE("MR-WER") {
  const std::vector<Segment> hyp = {seg("1", "a b c"), seg("2", "x y")};
  const std::vector<std::vector<Segment>> refs = {
      {seg("1", "a b d"), seg("2", "q r")},
      {seg("1", "a b c"), seg("2", "x z")},
      {seg("1", "z z z"), seg("2", "x y")},
  };
  const ScoreReport r = mr_wer(hyp, refs);
  CHECK(r.total_cost == 0.0);
  CHECK(r.segments[0].chosen_ref == 1);
  CHECK(r.segments[1].chosen_ref == 2);

  // Ties prefer the shorter reference, then the lower index.
  const std::vector<std::vector<Segment>> tie = {{seg("1", "a b c d")}, {seg("1", "a")}, {seg("1", "a")}};
  const ScoreReport t = mr_wer(std::vector<Segment>{seg("1", "a b")}, tie);
  CHECK(t.segments[0].chosen_ref == 1);
  CHECK(t.total_ref_len == 1);

  // Ragged sets: a reference may be missing from some sets.
  const std::vector<std::vector<Segment>> ragged = {{seg("1", "a b c")}, {seg("2", "x y")}};
  CHECK(mr_wer(hyp, ragged).value == 0.0);
  const std::vector<std::vector<Segment>> orphan = {{seg("1", "a b c")}};
  CHECK_THROWS_AS(mr_wer(hyp, orphan), DataError);

  // One reference set is WER.
  std::mt19937 rng(3);
  const auto h = random_corpus(rng, 200, 8), ref = random_corpus(rng, 200, 8);
  const std::vector<std::vector<Segment>> one = {ref};
  const ScoreReport m = mr_wer(h, one), w = score_corpus(h, ref, {Metric::kWer});
  CHECK(m.value == w.value);
  REQUIRE(m.segments.size() == w.segments.size());
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    CHECK(m.segments[i].cost == w.segments[i].cost);
    CHECK(m.segments[i].counts == w.segments[i].counts);
  }
}

TEST_CASE("pairwise overlap") {
  const std::vector<Segment> a = {seg("1", "a b c"), seg("2", "d e")};
  CHECK(pairwise_overlap(a, a) == 100.0);
  CHECK(pairwise_overlap(a, std::vector<Segment>{seg("1", "x y z"), seg("2", "p q")}) == 0.0);
  std::string long_a, long_b;
  for (int i = 0; i < 100; ++i) {
    long_a += " w" + std::to_string(i);
    long_b += i == 50 ? " other" : " w" + std::to_string(i);
  }
  CHECK(pairwise_overlap(std::vector<Segment>{seg("1", long_a)}, std::vector<Segment>{seg("1", long_b)}) ==
        doctest::Approx(99.0));
}

TEST_CASE("pearson") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {2, 4, 5, 9};
  const auto r = pearson(x, y);
  REQUIRE(r.r);
  CHECK(std::abs(*r.r - naive_pearson(x, y)) < 1e-12);
  CHECK(r.n == 4);

  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  CHECK(std::abs(*pearson(x, x).r - 1.0) < 1e-12);
  CHECK(std::abs(*pearson(x, neg).r + 1.0) < 1e-12);

  const std::vector<double> flat = {3, 3, 3, 3};
  CHECK(!pearson(x, flat).r);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), std::invalid_argument);

  // Keyed inputs are joined by id regardless of order.
  const std::vector<std::pair<std::string, double>> ka = {{"b", 2}, {"a", 1}, {"c", 3}, {"d", 4}};
  const std::vector<std::pair<std::string, double>> kb = {{"d", 9}, {"c", 5}, {"a", 2}, {"b", 4}};
  CHECK(std::abs(*pearson(ka, kb).r - naive_pearson(x, y)) < 1e-12);
  CHECK_THROWS_AS(pearson(ka, std::vector<std::pair<std::string, double>>{{"a", 1}}), DataError);
}

TEST_CASE("threshold sweep") {
  std::mt19937 rng(7);
  const std::vector<double> thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_corpus(rng, 20, 6), r = random_corpus(rng, 20, 6);
    const VariantTable table = random_table(rng, 6);
    const auto points = threshold_sweep(h, r, table, thresholds);
    const double wer = score_corpus(h, r, {Metric::kWer}).value;
    for (std::size_t i = 0; i < points.size(); ++i) {
      CHECK(points[i].report.value <= wer + 1e-9);
      if (i) {
        CHECK(points[i].report.value <= points[i - 1].report.value + 1e-9);
        CHECK(points[i].table_pairs >= points[i - 1].table_pairs);
      }
    }
  }

  const auto h = random_corpus(rng, 20, 6), r = random_corpus(rng, 20, 6);
  const VariantTable table = random_table(rng, 6);
  const std::vector<double> none = {0.0};
  const auto p = threshold_sweep(h, r, table, none);
  CHECK(p[0].report.value == score_corpus(h, r, {Metric::kWer}).value);
  CHECK(p[0].variant_matches == 0);

  const std::vector<double> bad = {0.3, 0.2};
  CHECK_THROWS_AS(threshold_sweep(h, r, table, bad), std::invalid_argument);

  // Every difference planted as a variant: zero at the top threshold under zero cost.
  const VariantTable planted({VariantPair{Phrase::parse("mA fy$"), Phrase::parse("mfy$"), 9, 3, 0.5},
                              VariantPair{Phrase::parse("El$An"), Phrase::parse("E$An"), 9, 3, 0.25}});
  const std::vector<Segment> ph = {seg("1", "mfy$ E$An x")}, pr = {seg("1", "mA fy$ El$An x")};
  const auto pp = threshold_sweep(ph, pr, planted, thresholds, CostMode::zero());
  CHECK(pp.back().report.value == 0.0);
  CHECK(pp.back().variant_matches == 2);
  CHECK(pp.front().variant_matches == 0);
}

TEST_CASE("report round trip") {
  const auto hyp = fixture("hyp.tsv"), ref = fixture("ref.tsv");
  const VariantTable table = load(kFixtures + "/example/variants.tsv");
  ScoreReport rep = score_corpus(hyp, ref, {Metric::kWerd, &table});
  std::ostringstream out;
  write_report(out, rep);
  const std::string text = out.str();
  CHECK(text.rfind("# config\tmetric=werd\tcost_mode=table\ttable_pairs=3\n", 0) == 0);
  std::istringstream in(text);
  const auto rows = read_report(in, "mem");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].id == "ex1");
  CHECK(rows[0].cost == doctest::Approx(rep.total_cost));
  CHECK(rows[0].ref_len == 13);
  CHECK(rows[0].variant_matches == 3);
  const auto rates = segment_rates(rows);
  CHECK(rates[0].second == doctest::Approx(rep.value));

  std::istringstream bad("# config\n x\t1\t2\n");
  CHECK_THROWS_AS(read_report(bad, "bad"), DataError);
}

TEST_CASE("order and parallel invariance") {
  std::mt19937 rng(13);
  auto h = random_corpus(rng, 300, 8), r = random_corpus(rng, 300, 8);
  const VariantTable table = random_table(rng, 8);
  for (Metric m : {Metric::kWer, Metric::kWerd, Metric::kTer}) {
    const ScoreReport base = score_corpus(h, r, {m, &table, CostMode::table(), 1});
    auto hs = h;
    std::shuffle(hs.begin(), hs.end(), rng);
    const ScoreReport shuffled = score_corpus(hs, r, {m, &table, CostMode::table(), 4});
    CHECK(base.value == shuffled.value);
    std::ostringstream a, b;
    write_report(a, base);
    write_report(b, shuffled);
    CHECK(a.str() == b.str());
  }
}
