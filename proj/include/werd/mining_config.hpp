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

#include "werd/editdist.hpp"

namespace werd {

struct MiningConfig {
  int n_min = 5;
  int n_max = 8;
  /// Candidate gate: normalized distance <= max_distance.
  double max_distance = 0.6;
  /// Frequency gate: frequent count >= ratio * rare count.
  double ratio = 3.0;
  std::size_t min_pair_contexts = 1;
  DistanceMode distance_mode = DistanceMode::kMin;
  /// Contexts with more distinct targets keep only the most frequent ones.
  std::size_t fanout_cap = 64;

  friend bool operator==(const MiningConfig&, const MiningConfig&) = default;
};

/// Throws std::invalid_argument unless 5 <= n_min <= n_max <= 8, 0 < t <= 1,
/// ratio >= 1, min_pair_contexts >= 1 and fanout_cap >= 2.
void validate(const MiningConfig& cfg);

}  // namespace werd
