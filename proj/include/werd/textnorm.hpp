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

#include <string>
#include <string_view>
#include <vector>

namespace werd {

/// A word: non-empty, no whitespace. All metrics count in tokens.
using Token = std::string;
using Tokens = std::vector<Token>;

/// An identified utterance (one line of a segment file).
struct Segment {
  std::string id;
  Tokens tokens;

  friend bool operator==(const Segment&, const Segment&) = default;
};

inline constexpr std::string_view kUrlPlaceholder = "<URL>";
inline constexpr std::string_view kUserPlaceholder = "<USER>";
inline constexpr std::string_view kEmoPlaceholder = "<EMO>";

struct NormalizationConfig {
  bool replace_urls = true;
  bool replace_mentions = true;
  bool replace_emoticons = true;
  bool unwrap_hashtags = true;
  bool strip_diacritics = true;
  bool strip_tatweel = true;
  int repetition_cap = 3;
  /// alef / alef-maqsura / teh-marbuta folding.
  bool arabic_surface = true;

  friend bool operator==(const NormalizationConfig&, const NormalizationConfig&) = default;
};

/// Throws std::invalid_argument unless repetition_cap >= 1.
void validate(const NormalizationConfig& cfg);

/// Turns raw text into tokens.
///
/// Each whitespace-delimited chunk goes through: removal of Arabic diacritics
/// (U+064B-U+065F, U+0670) and tatweel (U+0640); alef/yah/hah folding; capping
/// of repeated-character runs at `repetition_cap`; then recursive splitting
/// into URL/mention/emoticon placeholders and unwrapped hashtag words. The
/// result is a fixed point: normalizing the space-joined output returns it
/// unchanged.
Tokens normalize_text(std::string_view raw, const NormalizationConfig& cfg = {});

/// True iff normalize_text is a fixed point on `raw`'s output.
bool normalize_idempotence_check(std::string_view raw, const NormalizationConfig& cfg = {});

std::string join(const Tokens& tokens, std::string_view sep = " ");

// Standard Buckwalter transliteration (with the P/J/V/G extensions).
// Characters outside the table pass through unchanged.
std::string buckwalter_encode(std::string_view arabic);
std::string buckwalter_decode(std::string_view ascii);

}  // namespace werd
