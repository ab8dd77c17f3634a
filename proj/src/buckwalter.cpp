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

#include <array>
#include <utility>

#include "werd/textnorm.hpp"
#include "werd/utf8.hpp"

namespace werd {

namespace {

constexpr std::array<std::pair<char32_t, char>, 51> kBuckwalter = {{
    {0x0621, '\''}, {0x0622, '|'}, {0x0623, '>'}, {0x0624, '&'}, {0x0625, '<'}, {0x0626, '}'},
    {0x0627, 'A'},  {0x0628, 'b'}, {0x0629, 'p'}, {0x062A, 't'}, {0x062B, 'v'}, {0x062C, 'j'},
    {0x062D, 'H'},  {0x062E, 'x'}, {0x062F, 'd'}, {0x0630, '*'}, {0x0631, 'r'}, {0x0632, 'z'},
    {0x0633, 's'},  {0x0634, '$'}, {0x0635, 'S'}, {0x0636, 'D'}, {0x0637, 'T'}, {0x0638, 'Z'},
    {0x0639, 'E'},  {0x063A, 'g'}, {0x0640, '_'}, {0x0641, 'f'}, {0x0642, 'q'}, {0x0643, 'k'},
    {0x0644, 'l'},  {0x0645, 'm'}, {0x0646, 'n'}, {0x0647, 'h'}, {0x0648, 'w'}, {0x0649, 'Y'},
    {0x064A, 'y'},  {0x064B, 'F'}, {0x064C, 'N'}, {0x064D, 'K'}, {0x064E, 'a'}, {0x064F, 'u'},
    {0x0650, 'i'},  {0x0651, '~'}, {0x0652, 'o'}, {0x0670, '`'}, {0x0671, '{'}, {0x067E, 'P'},
    {0x0686, 'J'},  {0x06A4, 'V'}, {0x06AF, 'G'},
}};

struct Tables {
  std::array<char32_t, 128> from_ascii{};
  Tables() {
    for (auto [cp, ascii] : kBuckwalter) from_ascii[static_cast<unsigned char>(ascii)] = cp;
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

char to_ascii(char32_t cp) {
  for (auto [arabic, ascii] : kBuckwalter)
    if (arabic == cp) return ascii;
  return '\0';
}

}  // namespace

std::string buckwalter_encode(std::string_view arabic) {
  std::string out;
  out.reserve(arabic.size());
  for (char32_t cp : utf8::decode(arabic)) {
    if (char c = to_ascii(cp); c != '\0')
      out.push_back(c);
    else
      utf8::append(out, cp);
  }
  return out;
}

std::string buckwalter_decode(std::string_view ascii) {
  std::string out;
  out.reserve(ascii.size() * 2);
  for (char c : ascii) {
    const auto byte = static_cast<unsigned char>(c);
    if (byte < 128 && tables().from_ascii[byte] != 0)
      utf8::append(out, tables().from_ascii[byte]);
    else
      out.push_back(c);
  }
  return out;
}

}  // namespace werd
