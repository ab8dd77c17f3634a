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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "werd/textnorm.hpp"

namespace werd {

/// Parses `<id>\t<text>` lines, normalizing each text. Blank lines are
/// skipped; a line with no tab or a repeated id is a DataError naming `source`
/// and the line number.
std::vector<Segment> parse_segments(std::istream& in, const std::string& source,
                                    const NormalizationConfig& cfg);
std::vector<Segment> read_segments(const std::filesystem::path& path,
                                   const NormalizationConfig& cfg);

/// Calls `fn(line)` for each line of a plain-text corpus file.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line);
  }
}

}  // namespace werd
