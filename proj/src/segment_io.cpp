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

#include "werd/segment_io.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include "werd/error.hpp"

namespace werd {

std::vector<Segment> parse_segments(std::istream& in, const std::string& source,
                                    const NormalizationConfig& cfg) {
  std::vector<Segment> segments;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for_each_line(in, [&](const std::string& line) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) return;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(source, line_no, "expected <id>\\t<text>");
    std::string id = line.substr(0, tab);
    if (id.empty()) throw DataError(source, line_no, "empty segment id");
    if (!seen.insert(id).second) throw DataError(source, line_no, "duplicate segment id '" + id + "'");
    segments.push_back({std::move(id), normalize_text(std::string_view(line).substr(tab + 1), cfg)});
  });
  if (in.bad()) throw DataError(source, line_no, "read failure");
  return segments;
}

std::vector<Segment> read_segments(const std::filesystem::path& path,
                                   const NormalizationConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open segment file");
  return parse_segments(in, path.string(), cfg);
}

}  // namespace werd
