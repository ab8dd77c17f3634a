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

#include "werd/textnorm.hpp"

#include <array>
#include <stdexcept>

#include "werd/utf8.hpp"

namespace werd {

namespace {

bool is_diacritic(char32_t cp) { return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670; }

constexpr char32_t kTatweel = 0x0640;

char32_t fold_surface(char32_t cp) {
  switch (cp) {
    case 0x0622:
    case 0x0623:
    case 0x0625:
    case 0x0671:
      return 0x0627;  // alef
    case 0x0649:
      return 0x064A;  // alef maqsura -> yah
    case 0x0629:
      return 0x0647;  // teh marbuta -> heh
    default:
      return cp;
  }
}

bool is_emoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2300 && cp <= 0x23FF) || cp == 0x2B50 || cp == 0x2B55;
}

// Joiners and selectors that continue an emoji run but never start one.
bool is_emoji_continuation(char32_t cp) { return cp == 0x200D || cp == 0xFE0F || cp == 0x20E3; }

bool is_word_char(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') ||
           cp == '_';
  return !is_emoji(cp) && !is_emoji_continuation(cp);
}

char32_t ascii_lower(char32_t cp) { return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp; }

bool starts_with_ci(std::u32string_view text, std::size_t pos, std::u32string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (ascii_lower(text[pos + k]) != prefix[k]) return false;
  return true;
}

// Longest entries first so ":-)" wins over ":-" prefixes at the same position.
constexpr std::array<std::u32string_view, 22> kAsciiEmoticons = {
    U":-)", U":-(", U":-D", U":-P", U":-p", U";-)", U":'(", U"^_^", U"-_-",
    U":)",  U":(",  U":D",  U":P",  U":p",  U";)",  U"<3",  U":O",  U":o",
    U":|",  U":*",  U"=)",  U"=("};

constexpr std::size_t npos = std::u32string_view::npos;

class PieceSplitter {
 public:
  PieceSplitter(const NormalizationConfig& cfg, Tokens& out) : cfg_(cfg), out_(out) {}

  void split(std::u32string_view piece) {
    if (piece.empty()) return;

    if (cfg_.unwrap_hashtags && piece.front() == U'#') {
      std::size_t start = piece.find_first_not_of(U'#');
      if (start == npos) return;
      piece.remove_prefix(start);
      std::size_t pos = 0;
      while (pos <= piece.size()) {
        std::size_t end = piece.find(U'_', pos);
        if (end == npos) end = piece.size();
        split(piece.substr(pos, end - pos));
        pos = end + 1;
      }
      return;
    }

    if (cfg_.replace_urls) {
      if (std::size_t at = find_url(piece); at != npos) {
        split(piece.substr(0, at));
        emit(kUrlPlaceholder);
        return;
      }
    }

    if (cfg_.replace_mentions) {
      for (std::size_t i = 0; i + 1 < piece.size(); ++i) {
        if (piece[i] != U'@' || !is_word_char(piece[i + 1])) continue;
        std::size_t end = i + 1;
        while (end < piece.size() && is_word_char(piece[end])) ++end;
        split(piece.substr(0, i));
        emit(kUserPlaceholder);
        split(piece.substr(end));
        return;
      }
    }

    if (cfg_.replace_emoticons) {
      for (std::size_t i = 0; i < piece.size(); ++i) {
        if (!is_emoji(piece[i])) continue;
        std::size_t end = i + 1;
        while (end < piece.size() && (is_emoji(piece[end]) || is_emoji_continuation(piece[end])))
          ++end;
        split(piece.substr(0, i));
        emit(kEmoPlaceholder);
        split(piece.substr(end));
        return;
      }
      for (std::size_t i = 0; i < piece.size(); ++i) {
        for (std::u32string_view emo : kAsciiEmoticons) {
          if (piece.substr(i, emo.size()) != emo) continue;
          split(piece.substr(0, i));
          emit(kEmoPlaceholder);
          split(piece.substr(i + emo.size()));
          return;
        }
      }
    }

    out_.push_back(utf8::encode(piece));
  }

 private:
  static std::size_t find_url(std::u32string_view piece) {
    if (starts_with_ci(piece, 0, U"www.")) return 0;
    for (std::size_t i = 0; i < piece.size(); ++i)
      if (starts_with_ci(piece, i, U"http://") || starts_with_ci(piece, i, U"https://")) return i;
    return npos;
  }

  void emit(std::string_view placeholder) { out_.emplace_back(placeholder); }

  const NormalizationConfig& cfg_;
  Tokens& out_;
};

// Character-level rewrites on one whitespace-free chunk.
std::u32string rewrite_chunk(std::u32string_view chunk, const NormalizationConfig& cfg) {
  std::u32string stripped;
  stripped.reserve(chunk.size());
  for (char32_t cp : chunk) {
    if (cfg.strip_diacritics && is_diacritic(cp)) continue;
    if (cfg.strip_tatweel && cp == kTatweel) continue;
    stripped.push_back(cfg.arabic_surface ? fold_surface(cp) : cp);
  }

  std::u32string capped;
  capped.reserve(stripped.size());
  int run = 0;
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    run = (i > 0 && stripped[i] == stripped[i - 1]) ? run + 1 : 1;
    if (run <= cfg.repetition_cap) capped.push_back(stripped[i]);
  }
  return capped;
}

}  // namespace

void validate(const NormalizationConfig& cfg) {
  if (cfg.repetition_cap < 1) throw std::invalid_argument("repetition_cap must be >= 1");
}

Tokens normalize_text(std::string_view raw, const NormalizationConfig& cfg) {
  validate(cfg);
  const std::u32string text = utf8::decode(raw);
  Tokens out;
  PieceSplitter splitter(cfg, out);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && utf8::is_space(text[i])) ++i;
    std::size_t end = i;
    while (end < text.size() && !utf8::is_space(text[end])) ++end;
    if (end > i) {
      const std::u32string chunk = rewrite_chunk(std::u32string_view(text).substr(i, end - i), cfg);
      splitter.split(chunk);
    }
    i = end;
  }
  return out;
}

bool normalize_idempotence_check(std::string_view raw, const NormalizationConfig& cfg) {
  const Tokens once = normalize_text(raw, cfg);
  return normalize_text(join(once), cfg) == once;
}

std::string join(const Tokens& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace werd
