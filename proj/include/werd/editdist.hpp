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
#include <string>
#include <string_view>

#include "werd/textnorm.hpp"

namespace werd {

/// A 1-4 token phrase. The joined form (tokens separated by single spaces) is
/// what distances and table lookups operate on.
class Phrase {
 public:
  static constexpr std::size_t kMaxTokens = 4;

  Phrase() = default;
  /// Throws std::invalid_argument on 0 or more than kMaxTokens tokens, or on
  /// an empty / whitespace-bearing token.
  explicit Phrase(Tokens tokens);
  /// Splits on single spaces.
  static Phrase parse(std::string_view joined);

  const Tokens& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& joined() const noexcept { return joined_; }

  friend bool operator==(const Phrase& a, const Phrase& b) { return a.joined_ == b.joined_; }
  friend auto operator<=>(const Phrase& a, const Phrase& b) { return a.joined_ <=> b.joined_; }

 private:
  Tokens tokens_;
  std::string joined_;
};

enum class DistanceMode { kMin, kAvg };

/// Unit-cost Levenshtein distance over Unicode scalar values.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Edit distance of the joined strings divided by the shorter joined length
/// (kMin), or the mean of d/|a| and d/|b| (kAvg). Lengths count code points,
/// spaces included.
double normalized_distance(std::string_view a, std::string_view b, DistanceMode mode = DistanceMode::kMin);
double normalized_distance(const Phrase& a, const Phrase& b, DistanceMode mode = DistanceMode::kMin);

/// Lower bound on normalized_distance implied by the length difference alone.
double normalized_distance_lower_bound(std::size_t len_a, std::size_t len_b, DistanceMode mode);

DistanceMode parse_distance_mode(std::string_view name);
std::string_view to_string(DistanceMode mode);

}  // namespace werd
