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

#include "werd/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>

#include "werd/error.hpp"
#include "werd/segment_io.hpp"
#include "werd/utf8.hpp"

namespace werd {

void validate(const MiningConfig& cfg) {
  if (cfg.n_min < 5 || cfg.n_min > cfg.n_max || cfg.n_max > 8)
    throw std::invalid_argument("n-gram range must satisfy 5 <= nmin <= nmax <= 8");
  if (!(cfg.max_distance > 0.0 && cfg.max_distance <= 1.0))
    throw std::invalid_argument("max distance must lie in (0, 1]");
  if (!(cfg.ratio >= 1.0)) throw std::invalid_argument("frequency ratio must be >= 1");
  if (cfg.min_pair_contexts < 1) throw std::invalid_argument("min_pair_contexts must be >= 1");
  if (cfg.fanout_cap < 2) throw std::invalid_argument("fanout cap must be >= 2");
}

namespace {

constexpr char kSep = '\x1F';

template <typename Fn>
void for_each_window(const Tokens& tokens, const MiningConfig& cfg, Fn&& fn) {
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (tokens.size() < len) break;
    for (std::size_t start = 0; start + len <= tokens.size(); ++start) fn(start, len);
  }
}

std::string serialize_key(const Tokens& tokens, std::size_t start, std::size_t n) {
  std::string key;
  key.reserve(64);
  key.append(tokens[start]).push_back(kSep);
  key.append(tokens[start + 1]).push_back(kSep);
  key.append(tokens[start + n - 2]).push_back(kSep);
  key.append(tokens[start + n - 1]).push_back(kSep);
  for (std::size_t k = start + 2; k < start + n - 2; ++k) {
    if (k > start + 2) key.push_back(' ');
    key.append(tokens[k]);
  }
  return key;
}

std::string serialize_key(const ContextObservation& obs) {
  std::string key;
  for (const Token& w : obs.context.words) key.append(w).push_back(kSep);
  key.append(obs.target.joined());
  return key;
}

// Offset of the target within a serialized key (just past the 4th separator).
std::size_t target_offset(std::string_view key) {
  std::size_t pos = 0;
  for (int k = 0; k < 4; ++k) {
    pos = key.find(kSep, pos);
    if (pos == std::string_view::npos) throw DataError("corrupt spill key");
    ++pos;
  }
  return pos;
}

ContextKey parse_context(std::string_view prefix) {
  ContextKey ctx;
  std::size_t pos = 0;
  for (auto& word : ctx.words) {
    const std::size_t end = prefix.find(kSep, pos);
    word = std::string(prefix.substr(pos, end - pos));
    pos = end + 1;
  }
  return ctx;
}

class RunReader {
 public:
  explicit RunReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError(path.string() + ": cannot open spill run");
  }

  bool next(std::string& key, std::uint64_t& count) {
    std::string line;
    if (!std::getline(in_, line)) {
      if (in_.bad()) throw DataError(path_.string() + ": read failure");
      return false;
    }
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError(path_.string() + ": corrupt spill line");
    key.assign(line, 0, tab);
    count = std::stoull(line.substr(tab + 1));
    return true;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::filesystem::path make_spill_dir(const std::filesystem::path& base) {
  const std::filesystem::path root = base.empty() ? std::filesystem::temp_directory_path() : base;
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::filesystem::path dir = root / ("werd-spill-" + std::to_string(rd()) + std::to_string(rd()));
    if (std::filesystem::create_directories(dir)) return dir;
  }
  throw DataError(root.string() + ": cannot create spill directory");
}

}  // namespace

std::vector<ContextObservation> extract_contexts(const Tokens& tokens, const MiningConfig& cfg) {
  validate(cfg);
  std::vector<ContextObservation> out;
  for_each_window(tokens, cfg, [&](std::size_t start, std::size_t n) {
    ContextObservation obs;
    obs.context.words = {tokens[start], tokens[start + 1], tokens[start + n - 2], tokens[start + n - 1]};
    obs.target = Phrase(Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(start + 2),
                               tokens.begin() + static_cast<std::ptrdiff_t>(start + n - 2)));
    out.push_back(std::move(obs));
  });
  return out;
}

ContextCounts aggregate_counts(std::span<const ContextObservation> observations) {
  ContextCounts counts;
  for (const ContextObservation& obs : observations) counts[obs.context][obs.target] += obs.count;
  return counts;
}

// ---------------------------------------------------------------------------
// ContextCounter

struct ContextCounter::State {
  Options options;
  std::unordered_map<std::string, std::uint64_t> memory;
  std::vector<std::filesystem::path> runs;
  std::vector<std::filesystem::path> owned_dirs;
  std::filesystem::path dir;  // this counter's own spill dir, created lazily

  ~State() {
    std::error_code ec;
    for (const auto& d : owned_dirs) std::filesystem::remove_all(d, ec);
  }
};

ContextCounter::ContextCounter() : ContextCounter(Options{}) {}

ContextCounter::ContextCounter(Options options) : state_(std::make_unique<State>()) {
  if (options.max_entries == 0) throw std::invalid_argument("max_entries must be >= 1");
  state_->options = std::move(options);
}

ContextCounter::~ContextCounter() = default;
ContextCounter::ContextCounter(ContextCounter&&) noexcept = default;
ContextCounter& ContextCounter::operator=(ContextCounter&&) noexcept = default;

void ContextCounter::add_key(std::string key, std::uint64_t count) {
  state_->memory[std::move(key)] += count;
  if (state_->memory.size() >= state_->options.max_entries) spill();
}

void ContextCounter::add(const ContextObservation& obs) {
  if (obs.count == 0) throw std::invalid_argument("observation count must be >= 1");
  add_key(serialize_key(obs), obs.count);
}

std::size_t ContextCounter::add_line(const Tokens& tokens, const MiningConfig& cfg) {
  std::size_t added = 0;
  for_each_window(tokens, cfg, [&](std::size_t start, std::size_t n) {
    add_key(serialize_key(tokens, start, n), 1);
    ++added;
  });
  return added;
}

void ContextCounter::spill() {
  State& s = *state_;
  if (s.memory.empty()) return;
  if (s.dir.empty()) {
    s.dir = make_spill_dir(s.options.spill_dir);
    s.owned_dirs.push_back(s.dir);
  }
  std::vector<std::pair<std::string, std::uint64_t>> entries(
      std::make_move_iterator(s.memory.begin()), std::make_move_iterator(s.memory.end()));
  s.memory.clear();
  std::sort(entries.begin(), entries.end());
  const std::filesystem::path path = s.dir / ("run-" + std::to_string(s.runs.size()) + ".tsv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open spill run for writing");
  for (const auto& [key, count] : entries) out << key << '\t' << count << '\n';
  out.flush();
  if (!out) throw DataError(path.string() + ": write failure");
  s.runs.push_back(path);
}

void ContextCounter::merge(ContextCounter&& other) {
  State& o = *other.state_;
  for (auto& [key, count] : o.memory) add_key(key, count);
  o.memory.clear();
  state_->runs.insert(state_->runs.end(), o.runs.begin(), o.runs.end());
  state_->owned_dirs.insert(state_->owned_dirs.end(), o.owned_dirs.begin(), o.owned_dirs.end());
  o.runs.clear();
  o.owned_dirs.clear();
}

std::size_t ContextCounter::spilled_runs() const noexcept { return state_->runs.size(); }

void ContextCounter::drain(
    const std::function<void(const ContextKey&, std::span<const std::pair<Phrase, std::uint64_t>>)>& fn) {
  State& s = *state_;
  std::vector<std::pair<std::string, std::uint64_t>> memory(
      std::make_move_iterator(s.memory.begin()), std::make_move_iterator(s.memory.end()));
  s.memory.clear();
  std::sort(memory.begin(), memory.end());

  std::vector<RunReader> readers;
  readers.reserve(s.runs.size());
  for (const auto& run : s.runs) readers.emplace_back(run);

  // Source index == readers.size() denotes the in-memory run.
  struct Head {
    std::string key;
    std::uint64_t count;
    std::size_t source;
    bool operator>(const Head& o) const { return key > o.key || (key == o.key && source > o.source); }
  };
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
  std::size_t memory_pos = 0;
  auto advance = [&](std::size_t source) {
    Head h{{}, 0, source};
    if (source == readers.size()) {
      if (memory_pos == memory.size()) return;
      h.key = std::move(memory[memory_pos].first);
      h.count = memory[memory_pos].second;
      ++memory_pos;
    } else if (!readers[source].next(h.key, h.count)) {
      return;
    }
    heap.push(std::move(h));
  };
  for (std::size_t i = 0; i <= readers.size(); ++i) advance(i);

  std::string group_prefix;
  std::vector<std::pair<Phrase, std::uint64_t>> group;
  auto flush = [&] {
    if (!group.empty()) fn(parse_context(group_prefix), group);
    group.clear();
  };

  while (!heap.empty()) {
    Head top = heap.top();
    heap.pop();
    advance(top.source);
    while (!heap.empty() && heap.top().key == top.key) {
      top.count += heap.top().count;
      const std::size_t src = heap.top().source;
      heap.pop();
      advance(src);
    }
    const std::size_t offset = target_offset(top.key);
    const std::string_view prefix = std::string_view(top.key).substr(0, offset);
    if (prefix != group_prefix) {
      flush();
      group_prefix.assign(prefix);
    }
    group.emplace_back(Phrase::parse(std::string_view(top.key).substr(offset)), top.count);
  }
  flush();

  readers.clear();
  std::error_code ec;
  for (const auto& run : s.runs) std::filesystem::remove(run, ec);
  s.runs.clear();
}

// ---------------------------------------------------------------------------
// Candidate generation

CandidateBuilder::CandidateBuilder(MiningConfig cfg) : cfg_(cfg) { validate(cfg_); }

void CandidateBuilder::add_context(std::span<const std::pair<Phrase, std::uint64_t>> targets) {
  ++stats_.contexts;
  if (targets.size() < 2) return;

  std::vector<std::size_t> keep(targets.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (keep.size() > cfg_.fanout_cap) {
    ++stats_.capped_contexts;
    std::partial_sort(keep.begin(), keep.begin() + static_cast<std::ptrdiff_t>(cfg_.fanout_cap), keep.end(),
                      [&](std::size_t x, std::size_t y) {
                        if (targets[x].second != targets[y].second) return targets[x].second > targets[y].second;
                        return targets[x].first < targets[y].first;
                      });
    keep.resize(cfg_.fanout_cap);
  }

  std::vector<std::size_t> lengths(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) lengths[i] = utf8::length(targets[keep[i]].first.joined());

  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = i + 1; j < keep.size(); ++j) {
      if (normalized_distance_lower_bound(lengths[i], lengths[j], cfg_.distance_mode) > cfg_.max_distance)
        continue;
      const auto* a = &targets[keep[i]];
      const auto* b = &targets[keep[j]];
      if (b->first < a->first) std::swap(a, b);
      std::string key;
      key.reserve(a->first.joined().size() + b->first.joined().size() + 1);
      key.append(a->first.joined()).push_back('\n');
      key.append(b->first.joined());
      Evidence& ev = evidence_[std::move(key)];
      ev.count_a += a->second;
      ev.count_b += b->second;
      ++ev.shared;
    }
  }
}

VariantTable CandidateBuilder::finish(TableMeta meta) {
  stats_.candidate_pairs = evidence_.size();
  std::vector<VariantPair> pairs;
  for (const auto& [key, ev] : evidence_) {
    if (ev.shared < cfg_.min_pair_contexts) continue;
    const std::size_t nl = key.find('\n');
    Phrase a = Phrase::parse(std::string_view(key).substr(0, nl));
    Phrase b = Phrase::parse(std::string_view(key).substr(nl + 1));
    const double d = normalized_distance(a, b, cfg_.distance_mode);
    if (d > cfg_.max_distance) continue;
    const auto hi = std::max(ev.count_a, ev.count_b);
    const auto lo = std::min(ev.count_a, ev.count_b);
    if (static_cast<double>(hi) < cfg_.ratio * static_cast<double>(lo)) continue;
    VariantPair pair;
    // a < b, so ties orient the lexicographically smaller phrase as target.
    const bool a_frequent = ev.count_a >= ev.count_b;
    pair.target = a_frequent ? std::move(a) : std::move(b);
    pair.source = a_frequent ? std::move(b) : std::move(a);
    pair.target_count = hi;
    pair.source_count = lo;
    pair.score = std::max(std::round(d * 1e4) / 1e4, 1e-4);
    pairs.push_back(std::move(pair));
  }
  evidence_.clear();
  if (!meta.mining) meta.mining = cfg_;
  return VariantTable(std::move(pairs), std::move(meta));
}

VariantTable generate_candidates(const ContextCounts& counts, const MiningConfig& cfg) {
  CandidateBuilder builder(cfg);
  std::vector<std::pair<Phrase, std::uint64_t>> group;
  for (const auto& [ctx, targets] : counts) {
    group.assign(targets.begin(), targets.end());
    builder.add_context(group);
  }
  return builder.finish();
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

class ParallelCounter {
 public:
  ParallelCounter(const MiningConfig& cfg, const NormalizationConfig& norm, const MiningOptions& options)
      : cfg_(cfg), norm_(norm) {
    validate(cfg_);
    validate(norm_);
    const unsigned jobs = std::max(1u, options.jobs);
    for (unsigned j = 0; j < jobs; ++j) {
      counters_.emplace_back(options.counter);
      observations_.push_back(0);
    }
  }

  void process(std::span<const std::string> lines) {
    lines_ += lines.size();
    const std::size_t jobs = counters_.size();
    auto work = [&](std::size_t j) {
      const std::size_t begin = lines.size() * j / jobs;
      const std::size_t end = lines.size() * (j + 1) / jobs;
      for (std::size_t i = begin; i < end; ++i)
        observations_[j] += counters_[j].add_line(normalize_text(lines[i], norm_), cfg_);
    };
    if (jobs == 1) {
      work(0);
      return;
    }
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(work, j);
    for (auto& t : threads) t.join();
  }

  MiningResult finish() {
    ContextCounter& total = counters_.front();
    for (std::size_t j = 1; j < counters_.size(); ++j) total.merge(std::move(counters_[j]));
    MiningStats stats;
    stats.lines = lines_;
    for (std::size_t n : observations_) stats.observations += n;
    stats.spilled_runs = total.spilled_runs();

    CandidateBuilder builder(cfg_);
    total.drain([&](const ContextKey&, std::span<const std::pair<Phrase, std::uint64_t>> targets) {
      builder.add_context(targets);
    });
    TableMeta meta;
    meta.mining = cfg_;
    meta.normalization = norm_;
    VariantTable table = builder.finish(meta);
    const MiningStats& b = builder.stats();
    stats.contexts = b.contexts;
    stats.capped_contexts = b.capped_contexts;
    stats.candidate_pairs = b.candidate_pairs;
    return {std::move(table), stats};
  }

 private:
  MiningConfig cfg_;
  NormalizationConfig norm_;
  std::vector<ContextCounter> counters_;
  std::vector<std::size_t> observations_;
  std::size_t lines_ = 0;
};

constexpr std::size_t kBlockLines = 1 << 16;

}  // namespace

MiningResult mine_lines(std::span<const std::string> lines, const MiningConfig& cfg,
                        const NormalizationConfig& norm, const MiningOptions& options) {
  ParallelCounter counter(cfg, norm, options);
  for (std::size_t pos = 0; pos < lines.size(); pos += kBlockLines)
    counter.process(lines.subspan(pos, std::min(kBlockLines, lines.size() - pos)));
  return counter.finish();
}

MiningResult mine(std::span<const std::filesystem::path> inputs, const MiningConfig& cfg,
                  const NormalizationConfig& norm, const MiningOptions& options) {
  ParallelCounter counter(cfg, norm, options);
  std::vector<std::string> block;
  block.reserve(kBlockLines);
  for (const auto& path : inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open corpus file");
    for_each_line(in, [&](const std::string& line) {
      block.push_back(line);
      if (block.size() == kBlockLines) {
        counter.process(block);
        block.clear();
      }
    });
    if (in.bad()) throw DataError(path.string() + ": read failure");
  }
  counter.process(block);
  return counter.finish();
}

}  // namespace werd
