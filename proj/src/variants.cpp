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

#include "werd/variants.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "werd/error.hpp"

namespace werd {

void validate(const VariantPair& pair) {
  if (pair.target == pair.source) throw std::invalid_argument("self pair '" + pair.target.joined() + "'");
  if (pair.target_count == 0 || pair.source_count == 0) throw std::invalid_argument("pair counts must be positive");
  if (!std::isfinite(pair.score) || pair.score <= 0.0)
    throw std::invalid_argument("pair score must be finite and positive");
}

// ---------------------------------------------------------------------------
// VariantTable

std::string VariantTable::pair_key(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  std::string key;
  key.reserve(a.size() + b.size() + 1);
  key.append(a).push_back('\n');
  key.append(b);
  return key;
}

VariantTable::VariantTable(std::vector<VariantPair> pairs, TableMeta meta)
    : pairs_(std::move(pairs)), meta_(std::move(meta)) {
  std::sort(pairs_.begin(), pairs_.end(), [](const VariantPair& x, const VariantPair& y) {
    if (x.target != y.target) return x.target < y.target;
    return x.source < y.source;
  });
  pair_index_.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const VariantPair& p = pairs_[i];
    validate(p);
    if (!pair_index_.emplace(pair_key(p.target.joined(), p.source.joined()), i).second)
      throw std::invalid_argument("duplicate variant pair '" + p.target.joined() + "' / '" + p.source.joined() + "'");
    phrase_index_[p.target.joined()].push_back(i);
    phrase_index_[p.source.joined()].push_back(i);
  }
}

const VariantPair* VariantTable::find(std::string_view a, std::string_view b) const {
  if (pairs_.empty() || a == b) return nullptr;
  auto it = pair_index_.find(pair_key(a, b));
  return it == pair_index_.end() ? nullptr : &pairs_[it->second];
}

bool VariantTable::contains_phrase(std::string_view joined) const {
  return phrase_index_.find(joined) != phrase_index_.end();
}

std::span<const std::size_t> VariantTable::pairs_with(std::string_view joined) const {
  auto it = phrase_index_.find(joined);
  if (it == phrase_index_.end()) return {};
  return it->second;
}

std::optional<double> lookup_pair(const VariantTable& table, const Phrase& a, const Phrase& b) {
  if (const VariantPair* p = table.find(a.joined(), b.joined())) return p->score;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// TSV persistence

std::string format_decimal(double value, int max_decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", max_decimals, value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

void write_table(std::ostream& out, const VariantTable& table) {
  for (const VariantPair& p : table.pairs()) {
    out << p.target.joined() << '\t' << p.source.joined() << '\t' << p.target_count << '\t'
        << p.source_count << '\t' << format_score(p.score) << '\n';
  }
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

VariantTable read_table(std::istream& in, const std::string& source, TableMeta meta) {
  std::vector<VariantPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_tabs(line);
    if (fields.size() != 5) throw DataError(source, line_no, "expected 5 tab-separated fields");
    VariantPair pair;
    try {
      pair.target = Phrase::parse(fields[0]);
      pair.source = Phrase::parse(fields[1]);
    } catch (const std::invalid_argument& e) {
      throw DataError(source, line_no, e.what());
    }
    if (!parse_number(fields[2], pair.target_count) || !parse_number(fields[3], pair.source_count))
      throw DataError(source, line_no, "bad count");
    if (!parse_number(fields[4], pair.score)) throw DataError(source, line_no, "bad score");
    try {
      validate(pair);
    } catch (const std::invalid_argument& e) {
      throw DataError(source, line_no, e.what());
    }
    pairs.push_back(std::move(pair));
  }
  if (in.bad()) throw DataError(source, line_no, "read failure");
  try {
    return VariantTable(std::move(pairs), std::move(meta));
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
}

void save(const VariantTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  write_table(out, table);
  out.flush();
  if (!out) throw DataError(path.string() + ": write failure");
}

VariantTable load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open variant table");
  return read_table(in, path.string(), load_meta(meta_path(path)).value_or(TableMeta{}));
}

// ---------------------------------------------------------------------------
// Metadata sidecar

std::filesystem::path meta_path(const std::filesystem::path& table_path) {
  std::filesystem::path p = table_path;
  p += ".meta.json";
  return p;
}

namespace {

nlohmann::json to_json(const NormalizationConfig& c) {
  return {{"replace_urls", c.replace_urls},         {"replace_mentions", c.replace_mentions},
          {"replace_emoticons", c.replace_emoticons}, {"unwrap_hashtags", c.unwrap_hashtags},
          {"strip_diacritics", c.strip_diacritics}, {"strip_tatweel", c.strip_tatweel},
          {"repetition_cap", c.repetition_cap},     {"arabic_surface", c.arabic_surface}};
}

NormalizationConfig normalization_from_json(const nlohmann::json& j) {
  NormalizationConfig c;
  c.replace_urls = j.at("replace_urls").get<bool>();
  c.replace_mentions = j.at("replace_mentions").get<bool>();
  c.replace_emoticons = j.at("replace_emoticons").get<bool>();
  c.unwrap_hashtags = j.at("unwrap_hashtags").get<bool>();
  c.strip_diacritics = j.at("strip_diacritics").get<bool>();
  c.strip_tatweel = j.at("strip_tatweel").get<bool>();
  c.repetition_cap = j.at("repetition_cap").get<int>();
  c.arabic_surface = j.at("arabic_surface").get<bool>();
  return c;
}

nlohmann::json to_json(const MiningConfig& c) {
  return {{"n_min", c.n_min},
          {"n_max", c.n_max},
          {"max_distance", c.max_distance},
          {"ratio", c.ratio},
          {"min_pair_contexts", c.min_pair_contexts},
          {"distance_mode", std::string(to_string(c.distance_mode))},
          {"fanout_cap", c.fanout_cap}};
}

MiningConfig mining_from_json(const nlohmann::json& j) {
  MiningConfig c;
  c.n_min = j.at("n_min").get<int>();
  c.n_max = j.at("n_max").get<int>();
  c.max_distance = j.at("max_distance").get<double>();
  c.ratio = j.at("ratio").get<double>();
  c.min_pair_contexts = j.at("min_pair_contexts").get<std::size_t>();
  c.distance_mode = parse_distance_mode(j.at("distance_mode").get<std::string>());
  c.fanout_cap = j.at("fanout_cap").get<std::size_t>();
  return c;
}

}  // namespace

void save_meta(const TableMeta& meta, const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::object();
  if (meta.mining) j["mining"] = to_json(*meta.mining);
  if (meta.normalization) j["normalization"] = to_json(*meta.normalization);
  if (meta.max_ed) j["max_ed"] = *meta.max_ed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError(path.string() + ": write failure");
}

std::optional<TableMeta> load_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    TableMeta meta;
    if (j.contains("mining")) meta.mining = mining_from_json(j.at("mining"));
    if (j.contains("normalization")) meta.normalization = normalization_from_json(j.at("normalization"));
    if (j.contains("max_ed")) meta.max_ed = j.at("max_ed").get<double>();
    return meta;
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": malformed table metadata: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Filtering and classification

VariantTable filter(const VariantTable& table, double max_ed) {
  if (!(max_ed >= 0.0)) throw std::invalid_argument("max_ed must be >= 0");
  std::vector<VariantPair> kept;
  for (const VariantPair& p : table.pairs())
    if (p.score <= max_ed) kept.push_back(p);
  TableMeta meta = table.meta();
  meta.max_ed = meta.max_ed ? std::min(*meta.max_ed, max_ed) : max_ed;
  return VariantTable(std::move(kept), std::move(meta));
}

std::string_view to_string(VariantClass cls) {
  switch (cls) {
    case VariantClass::kSplitting:
      return "splitting";
    case VariantClass::kMerging:
      return "merging";
    case VariantClass::kSubstitution:
      return "substitution";
  }
  return "?";
}

VariantClass classify(const VariantPair& pair) {
  if (pair.source.size() < pair.target.size()) return VariantClass::kSplitting;
  if (pair.source.size() > pair.target.size()) return VariantClass::kMerging;
  return VariantClass::kSubstitution;
}

double ClassHistogram::percent(VariantClass cls) const {
  if (total == 0) return 0.0;
  const std::size_t n = cls == VariantClass::kSplitting ? splitting
                        : cls == VariantClass::kMerging ? merging
                                                        : substitution;
  return 100.0 * static_cast<double>(n) / static_cast<double>(total);
}

ClassHistogram class_histogram(const VariantTable& table) {
  if (table.empty()) throw std::invalid_argument("class histogram of an empty table");
  ClassHistogram h;
  for (const VariantPair& p : table.pairs()) {
    ++h.total;
    switch (classify(p)) {
      case VariantClass::kSplitting:
        ++h.splitting;
        break;
      case VariantClass::kMerging:
        ++h.merging;
        break;
      case VariantClass::kSubstitution:
        ++h.substitution;
        break;
    }
  }
  return h;
}

std::vector<VariantMatch> sample_matches(std::span<const VariantMatch> matches, std::size_t k,
                                         std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("sample size must be >= 1");
  if (matches.size() <= k) return {matches.begin(), matches.end()};
  std::vector<VariantMatch> out;
  out.reserve(k);
  std::mt19937_64 rng(seed);
  std::sample(matches.begin(), matches.end(), std::back_inserter(out), k, rng);
  return out;
}

}  // namespace werd
