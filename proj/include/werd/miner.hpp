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

#include <array>
#include <functional>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "werd/editdist.hpp"
#include "werd/mining_config.hpp"
#include "werd/textnorm.hpp"
#include "werd/variants.hpp"

namespace werd {

/// Two left and two right context words around an n-gram's middle.
struct ContextKey {
  std::array<Token, 4> words;  // L1, L2, R1, R2

  friend auto operator<=>(const ContextKey&, const ContextKey&) = default;
};

struct ContextObservation {
  ContextKey context;
  Phrase target;
  std::uint64_t count = 1;
};

/// Every window of length n in [n_min, n_max]: the outer two words on each
/// side form the context, the 1-4 middle words the target.
std::vector<ContextObservation> extract_contexts(const Tokens& tokens, const MiningConfig& cfg);

using ContextCounts = std::map<ContextKey, std::map<Phrase, std::uint64_t>>;

/// In-memory aggregation, for small inputs and tests.
ContextCounts aggregate_counts(std::span<const ContextObservation> observations);

/// Exact (context, target) counting that spills sorted runs to disk once the
/// in-memory table exceeds `max_entries`, then k-way merges them.
///
/// Spill lines are `L1\x1FL2\x1FR1\x1FR2\x1Ftarget\tcount`, sorted bytewise,
/// so all targets of one context are contiguous in the merged stream.
class ContextCounter {
 public:
  struct Options {
    std::size_t max_entries = 4'000'000;
    std::filesystem::path spill_dir;  // empty: system temp directory
  };

  ContextCounter();
  explicit ContextCounter(Options options);
  ~ContextCounter();
  ContextCounter(ContextCounter&&) noexcept;
  ContextCounter& operator=(ContextCounter&&) noexcept;

  void add(const ContextObservation& obs);
  /// Extracts and counts every window of `tokens`; returns the number added.
  std::size_t add_line(const Tokens& tokens, const MiningConfig& cfg);
  /// Absorbs another counter's entries and spill runs.
  void merge(ContextCounter&& other);

  std::size_t spilled_runs() const noexcept;

  /// Visits contexts in sorted order with their (target, count) lists sorted
  /// by target. Consumes the counter.
  void drain(const std::function<void(const ContextKey&, std::span<const std::pair<Phrase, std::uint64_t>>)>& fn);

 private:
  void add_key(std::string key, std::uint64_t count);
  void spill();

  struct State;
  std::unique_ptr<State> state_;
};

struct MiningStats {
  std::size_t lines = 0;
  std::size_t observations = 0;
  std::size_t contexts = 0;
  std::size_t capped_contexts = 0;
  std::size_t candidate_pairs = 0;
  std::size_t spilled_runs = 0;
};

/// Accumulates per-pair evidence one context at a time and applies the
/// distance, frequency-ratio and shared-context gates at the end.
class CandidateBuilder {
 public:
  explicit CandidateBuilder(MiningConfig cfg);

  void add_context(std::span<const std::pair<Phrase, std::uint64_t>> targets);
  VariantTable finish(TableMeta meta = {});

  const MiningStats& stats() const noexcept { return stats_; }

 private:
  struct Evidence {
    std::uint64_t count_a = 0;  // lexicographically smaller phrase
    std::uint64_t count_b = 0;
    std::size_t shared = 0;
  };

  MiningConfig cfg_;
  MiningStats stats_;
  std::unordered_map<std::string, Evidence> evidence_;
};

VariantTable generate_candidates(const ContextCounts& counts, const MiningConfig& cfg);

struct MiningOptions {
  unsigned jobs = 1;
  ContextCounter::Options counter;
};

struct MiningResult {
  VariantTable table;
  MiningStats stats;
};

/// normalize -> extract -> aggregate -> generate over plain-text corpus files
/// (one document per line).
MiningResult mine(std::span<const std::filesystem::path> inputs, const MiningConfig& cfg,
                  const NormalizationConfig& norm, const MiningOptions& options = {});
MiningResult mine_lines(std::span<const std::string> lines, const MiningConfig& cfg,
                        const NormalizationConfig& norm, const MiningOptions& options = {});

}  // namespace werd
