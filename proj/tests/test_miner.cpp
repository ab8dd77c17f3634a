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
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "werd/error.hpp"
#include "werd/miner.hpp"

using namespace werd;

namespace {

Tokens words(std::string_view text) { return normalize_text(text); }

ContextKey ctx(const char* l1, const char* l2, const char* r1, const char* r2) { return ContextKey{{l1, l2, r1, r2}}; }

// Independent recount: direct window enumeration into an ordered map.
using FlatCounts = std::map<std::tuple<std::string, std::string, std::string, std::string, std::string>, std::uint64_t>;

FlatCounts recount(const std::vector<Tokens>& lines, int n_min, int n_max) {
  FlatCounts counts;
  for (const Tokens& t : lines) {
    for (int n = n_min; n <= n_max; ++n) {
      for (int s = 0; s + n <= static_cast<int>(t.size()); ++s) {
        std::string target;
        for (int k = s + 2; k < s + n - 2; ++k) target += (k > s + 2 ? " " : "") + t[k];
        ++counts[{t[s], t[s + 1], t[s + n - 2], t[s + n - 1], target}];
      }
    }
  }
  return counts;
}

FlatCounts drain_flat(ContextCounter& counter) {
  FlatCounts out;
  counter.drain([&](const ContextKey& c, std::span<const std::pair<Phrase, std::uint64_t>> targets) {
    for (const auto& [p, n] : targets) out[{c.words[0], c.words[1], c.words[2], c.words[3], p.joined()}] += n;
  });
  return out;
}

// skew > 1 biases word choice toward low ids, giving lopsided frequencies.
std::vector<std::string> random_corpus(std::size_t lines, std::size_t vocab, std::uint32_t seed, double skew = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(0, 14);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < lines; ++i) {
    std::string line;
    for (std::size_t k = len(rng); k > 0; --k) {
      const auto w = static_cast<std::size_t>(static_cast<double>(vocab) * std::pow(u(rng), skew));
      line += "w" + std::to_string(w) + " ";
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("extract_contexts windows") {
  const MiningConfig cfg;
  CHECK(extract_contexts(words("a b c d"), cfg).empty());

  const auto five = extract_contexts(words("a b t c d"), cfg);
  REQUIRE(five.size() == 1);
  CHECK(five[0].context == ctx("a", "b", "c", "d"));
  CHECK(five[0].target.joined() == "t");

  const auto six = extract_contexts(words("a b t1 t2 c d"), cfg);
  REQUIRE(six.size() == 3);
  CHECK(six[0].context == ctx("a", "b", "t2", "c"));
  CHECK(six[1].context == ctx("b", "t1", "c", "d"));
  CHECK(six[2].context == ctx("a", "b", "c", "d"));
  CHECK(six[2].target.joined() == "t1 t2");
}

TEST_CASE("window-count identity") {
  const MiningConfig cfg;
  for (std::size_t len = 0; len < 20; ++len) {
    Tokens t;
    for (std::size_t k = 0; k < len; ++k) t.push_back("w" + std::to_string(k % 3));
    std::size_t expected = 0;
    for (int n = 5; n <= 8; ++n) expected += len >= static_cast<std::size_t>(n) ? len - n + 1 : 0;
    CHECK(extract_contexts(t, cfg).size() == expected);
  }
}

TEST_CASE("mining config validation") {
  MiningConfig cfg;
  cfg.n_min = 4;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_max = 9;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.max_distance = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.ratio = 0.5;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("aggregate_counts") {
  CHECK(aggregate_counts({}).empty());
  const auto obs = extract_contexts(words("a b t c d"), MiningConfig{});
  std::vector<ContextObservation> thrice(3, obs[0]);
  const ContextCounts counts = aggregate_counts(thrice);
  CHECK(counts.at(ctx("a", "b", "c", "d")).at(Phrase::parse("t")) == 3);
}

TEST_CASE("out-of-core counting equals an in-memory recount") {
  const auto corpus = random_corpus(10000, 30, 5);
  std::vector<Tokens> lines;
  for (const auto& l : corpus) lines.push_back(words(l));
  const FlatCounts expected = recount(lines, 5, 8);

  MiningConfig cfg;
  ContextCounter counter(ContextCounter::Options{5000, {}});
  for (const Tokens& t : lines) counter.add_line(t, cfg);
  CHECK(counter.spilled_runs() > 1);
  CHECK(drain_flat(counter) == expected);

  // Sharded across three counters, then merged.
  std::vector<ContextCounter> shards;
  for (int s = 0; s < 3; ++s) shards.emplace_back(ContextCounter::Options{3000, {}});
  for (std::size_t i = 0; i < lines.size(); ++i) shards[i % 3].add_line(lines[i], cfg);
  shards[0].merge(std::move(shards[1]));
  shards[0].merge(std::move(shards[2]));
  CHECK(drain_flat(shards[0]) == expected);
}

TEST_CASE("spill files are removed") {
  const auto dir = std::filesystem::temp_directory_path() / "werd-miner-test-spill";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    ContextCounter counter(ContextCounter::Options{10, dir});
    for (const auto& l : random_corpus(200, 50, 9)) counter.add_line(words(l), MiningConfig{});
    CHECK(counter.spilled_runs() > 0);
    CHECK(!std::filesystem::is_empty(dir));
  }
  CHECK(std::filesystem::is_empty(dir));
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate_candidates: the mAfy / mAAfy row") {
  ContextCounts counts;
  counts[ctx("l1", "l2", "r1", "r2")][Phrase::parse("mAfy")] = 500;
  counts[ctx("l1", "l2", "r1", "r2")][Phrase::parse("mAAfy")] = 50;
  counts[ctx("k1", "k2", "r1", "r2")][Phrase::parse("mAfy")] = 252;
  counts[ctx("k1", "k2", "r1", "r2")][Phrase::parse("mAAfy")] = 25;
  counts[ctx("z1", "z2", "r1", "r2")][Phrase::parse("mAfy")] = 1000;  // not shared
  const VariantTable table = generate_candidates(counts, MiningConfig{});
  REQUIRE(table.size() == 1);
  const VariantPair& p = table.pairs()[0];
  CHECK(p.target.joined() == "mAfy");
  CHECK(p.source.joined() == "mAAfy");
  CHECK(p.target_count == 752);
  CHECK(p.source_count == 75);
  CHECK(p.score == 0.25);
}

TEST_CASE("generate_candidates gates") {
  MiningConfig cfg;
  SUBCASE("ratio below N") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAfy")] = 10;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAAfy")] = 9;
    CHECK(generate_candidates(counts, cfg).empty());
  }
  SUBCASE("ratio exactly N is kept") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAfy")] = 9;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAAfy")] = 3;
    CHECK(generate_candidates(counts, cfg).size() == 1);
  }
  SUBCASE("distance above t") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("abcdefghij")] = 100;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("abcXXXXXXX")] = 1;
    CHECK(generate_candidates(counts, cfg).empty());
  }
  SUBCASE("distance exactly t is kept") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("abcde")] = 100;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("abXYZ")] = 1;  // 3/5
    CHECK(generate_candidates(counts, cfg).size() == 1);
  }
  SUBCASE("min shared contexts") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAfy")] = 30;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAAfy")] = 1;
    cfg.min_pair_contexts = 2;
    CHECK(generate_candidates(counts, cfg).empty());
    counts[ctx("e", "b", "c", "d")][Phrase::parse("mAfy")] = 30;
    counts[ctx("e", "b", "c", "d")][Phrase::parse("mAAfy")] = 1;
    CHECK(generate_candidates(counts, cfg).size() == 1);
  }
  SUBCASE("cross-length split/merge pairs are reachable") {
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mA fy$")] = 40;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mfy$")] = 4;
    const VariantTable t = generate_candidates(counts, cfg);
    REQUIRE(t.size() == 1);
    CHECK(t.pairs()[0].target.joined() == "mA fy$");
    CHECK(t.pairs()[0].score == 0.5);
  }
  SUBCASE("frequency tie orients the smaller string as target") {
    cfg.ratio = 1.0;
    ContextCounts counts;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAfy")] = 5;
    counts[ctx("a", "b", "c", "d")][Phrase::parse("mAAfy")] = 5;
    const VariantTable t = generate_candidates(counts, cfg);
    REQUIRE(t.size() == 1);
    CHECK(t.pairs()[0].target.joined() == "mAAfy");
  }
}

TEST_CASE("fan-out cap keeps the most frequent targets") {
  MiningConfig cfg;
  cfg.fanout_cap = 4;
  CandidateBuilder builder(cfg);
  std::vector<std::pair<Phrase, std::uint64_t>> targets;
  for (int k = 0; k < 10; ++k) targets.emplace_back(Phrase::parse("xy" + std::to_string(k)), k == 0 ? 100 : 1);
  builder.add_context(targets);
  const VariantTable t = builder.finish();
  CHECK(builder.stats().capped_contexts == 1);
  // xy0 (100) plus the three smallest tied targets xy1..xy3.
  CHECK(t.size() == 3);
  for (const auto& p : t.pairs()) CHECK(p.target.joined() == "xy0");
}

TEST_CASE("mine: planted pairs, empty corpus, distance gate") {
  const MiningConfig cfg;
  const NormalizationConfig norm;
  CHECK(mine_lines({}, cfg, norm).table.empty());

  std::vector<std::string> lines = random_corpus(2000, 5000, 17);
  const char* contexts[][4] = {{"qa", "qb", "qc", "qd"}, {"ra", "rb", "rc", "rd"}, {"sa", "sb", "sc", "sd"}};
  for (const auto& c : contexts) {
    for (int k = 0; k < 10; ++k) lines.push_back(std::string(c[0]) + " " + c[1] + " Alywm " + c[2] + " " + c[3]);
    lines.push_back(std::string(c[0]) + " " + c[1] + " Alywwm " + c[2] + " " + c[3]);
    // distance 0.7 > t: never emitted
    for (int k = 0; k < 10; ++k) lines.push_back(std::string(c[0]) + " " + c[1] + " abcdefghij " + c[2] + " " + c[3]);
    lines.push_back(std::string(c[0]) + " " + c[1] + " abcXXXXXXX " + c[2] + " " + c[3]);
  }
  std::shuffle(lines.begin(), lines.end(), std::mt19937(1));
  const MiningResult result = mine_lines(lines, cfg, norm);
  REQUIRE(result.table.size() == 1);
  const VariantPair& p = result.table.pairs()[0];
  CHECK(p.target.joined() == "Alywm");
  CHECK(p.source.joined() == "Alywwm");
  CHECK(p.target_count == 30);
  CHECK(p.source_count == 3);
  REQUIRE(result.table.meta().mining);
  CHECK(*result.table.meta().mining == cfg);

  SUBCASE("order and sharding invariance") {
    std::vector<std::string> shuffled = lines;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(99));
    MiningOptions options;
    options.jobs = 3;
    options.counter.max_entries = 2000;
    CHECK(mine_lines(shuffled, cfg, norm, options).table == result.table);
  }
}

TEST_CASE("mined pairs satisfy the table invariants") {
  std::vector<std::string> lines = random_corpus(3000, 12, 23, 3.0);
  MiningConfig cfg;
  const MiningResult result = mine_lines(lines, cfg, NormalizationConfig{});
  CHECK(!result.table.empty());
  for (const VariantPair& p : result.table.pairs()) {
    CHECK(p.score > 0.0);
    CHECK(p.score <= cfg.max_distance);
    CHECK(static_cast<double>(p.target_count) >= cfg.ratio * static_cast<double>(p.source_count));
    CHECK(p.target != p.source);
    CHECK(p.target.size() <= 4);
    CHECK(p.source.size() <= 4);
  }
}

TEST_CASE("mine reads files and reports missing ones") {
  const auto dir = std::filesystem::temp_directory_path() / "werd-miner-files";
  std::filesystem::create_directories(dir);
  {
    std::ofstream a(dir / "a.txt");
    for (int k = 0; k < 6; ++k) a << "l1 l2 mAfy r1 r2\n";
    std::ofstream b(dir / "b.txt");
    b << "l1 l2 mAAfy r1 r2\n";
  }
  const std::vector<std::filesystem::path> inputs = {dir / "a.txt", dir / "b.txt"};
  const MiningResult r = mine(inputs, MiningConfig{}, NormalizationConfig{});
  REQUIRE(r.table.size() == 1);
  CHECK(r.stats.lines == 7);
  const std::vector<std::filesystem::path> missing = {dir / "nope.txt"};
  CHECK_THROWS_AS(mine(missing, MiningConfig{}, NormalizationConfig{}), DataError);
  std::filesystem::remove_all(dir);
}
