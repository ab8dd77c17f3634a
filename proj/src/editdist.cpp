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

#include "werd/editdist.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "werd/utf8.hpp"

namespace werd {

Phrase::Phrase(Tokens tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.size() > kMaxTokens)
    throw std::invalid_argument("phrase must have 1-4 tokens, got " + std::to_string(tokens_.size()));
  for (const Token& t : tokens_) {
    if (t.empty()) throw std::invalid_argument("empty token in phrase");
    for (char32_t cp : utf8::decode(t))
      if (utf8::is_space(cp)) throw std::invalid_argument("whitespace inside token '" + t + "'");
  }
  joined_ = join(tokens_);
}

Phrase Phrase::parse(std::string_view joined) {
  Tokens tokens;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = joined.find(' ', pos);
    tokens.emplace_back(joined.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return Phrase(std::move(tokens));
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(utf8::decode(a), utf8::decode(b));
}

double normalized_distance(std::string_view a, std::string_view b, DistanceMode mode) {
  const std::u32string ua = utf8::decode(a);
  const std::u32string ub = utf8::decode(b);
  if (ua.empty() || ub.empty()) throw std::invalid_argument("normalized_distance of an empty string");
  const auto d = static_cast<double>(edit_distance(ua, ub));
  const auto la = static_cast<double>(ua.size());
  const auto lb = static_cast<double>(ub.size());
  if (mode == DistanceMode::kMin) return d / std::min(la, lb);
  return (d / la + d / lb) / 2.0;
}

double normalized_distance(const Phrase& a, const Phrase& b, DistanceMode mode) {
  return normalized_distance(a.joined(), b.joined(), mode);
}

double normalized_distance_lower_bound(std::size_t len_a, std::size_t len_b, DistanceMode mode) {
  if (len_a == 0 || len_b == 0) return 0.0;
  const auto d = static_cast<double>(len_a > len_b ? len_a - len_b : len_b - len_a);
  const auto la = static_cast<double>(len_a);
  const auto lb = static_cast<double>(len_b);
  if (mode == DistanceMode::kMin) return d / std::min(la, lb);
  return (d / la + d / lb) / 2.0;
}

DistanceMode parse_distance_mode(std::string_view name) {
  if (name == "min") return DistanceMode::kMin;
  if (name == "avg") return DistanceMode::kAvg;
  throw std::invalid_argument("unknown distance mode '" + std::string(name) + "' (expected min|avg)");
}

std::string_view to_string(DistanceMode mode) { return mode == DistanceMode::kMin ? "min" : "avg"; }

}  // namespace werd
