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

#include "werd/align.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace werd {

char op_tag(OpKind kind) {
  switch (kind) {
    case OpKind::kMatch:
      return 'C';
    case OpKind::kSub:
      return 'S';
    case OpKind::kIns:
      return 'I';
    case OpKind::kDel:
      return 'D';
    case OpKind::kVariant:
      return 'V';
  }
  return '?';
}

CostMode CostMode::constant(double c) {
  if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("variant cost must be finite and >= 0");
  return CostMode(Kind::kConst, c);
}

CostMode CostMode::parse(std::string_view text) {
  if (text == "table") return table();
  if (text == "zero") return zero();
  if (text.substr(0, 6) == "const:") {
    const std::string_view num = text.substr(6);
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
    if (ec == std::errc() && ptr == num.data() + num.size()) return constant(c);
  }
  throw std::invalid_argument("unknown variant cost '" + std::string(text) + "' (expected table|zero|const:<x>)");
}

double CostMode::cost_of(const VariantPair& pair) const noexcept {
  switch (kind_) {
    case Kind::kTable:
      return pair.score;
    case Kind::kZero:
      return 0.0;
    case Kind::kConst:
      return constant_;
  }
  return 0.0;
}

std::string CostMode::to_string() const {
  switch (kind_) {
    case Kind::kTable:
      return "table";
    case Kind::kZero:
      return "zero";
    case Kind::kConst:
      return "const:" + format_score(constant_);
  }
  return "?";
}

namespace {

constexpr double kEps = 1e-9;

bool same_cost(double a, double b) { return std::abs(a - b) <= kEps * std::max(1.0, std::abs(a)); }

class Grid {
 public:
  Grid(std::size_t rows, std::size_t cols, double fill) : cols_(cols), cells_(rows * cols, fill) {}
  double& operator()(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }

 private:
  std::size_t cols_;
  std::vector<double> cells_;
};

void tally(Alignment& a) {
  a.counts = {};
  for (const EditOp& op : a.ops) {
    switch (op.kind) {
      case OpKind::kMatch:
        ++a.counts.match;
        break;
      case OpKind::kSub:
        ++a.counts.sub;
        break;
      case OpKind::kIns:
        ++a.counts.ins;
        break;
      case OpKind::kDel:
        ++a.counts.del;
        break;
      case OpKind::kVariant:
        ++a.counts.variant;
        break;
    }
  }
}

// Joined phrases for every span of 1..4 tokens, with table membership.
struct SpanPhrases {
  // text[i][p - 1] is tokens[i, i + p) joined; empty when out of range.
  std::vector<std::array<std::string, Phrase::kMaxTokens>> text;
  std::vector<std::array<bool, Phrase::kMaxTokens>> listed;

  SpanPhrases(const Tokens& tokens, const VariantTable& table)
      : text(tokens.size()), listed(tokens.size()) {
    if (table.empty()) return;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::string joined;
      for (std::size_t p = 1; p <= Phrase::kMaxTokens && i + p <= tokens.size(); ++p) {
        if (p > 1) joined.push_back(' ');
        joined += tokens[i + p - 1];
        text[i][p - 1] = joined;
        listed[i][p - 1] = table.contains_phrase(joined);
      }
    }
  }
};

}  // namespace

Alignment wer_align(const Tokens& hyp, const Tokens& ref) {
  const std::size_t n = hyp.size(), m = ref.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0u : 1u), at(i, j - 1) + 1,
                           at(i - 1, j) + 1});

  Alignment a;
  a.hyp_len = n;
  a.ref_len = m;
  a.total_cost = static_cast<double>(at(n, m));
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    EditOp op;
    if (i > 0 && j > 0 && hyp[i - 1] == ref[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      op = {OpKind::kMatch, {i - 1, i}, {j - 1, j}, 0.0, {}};
      --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      op = {OpKind::kSub, {i - 1, i}, {j - 1, j}, 1.0, {}};
      --i, --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      op = {OpKind::kDel, {i, i}, {j - 1, j}, 1.0, {}};
      --j;
    } else {
      op = {OpKind::kIns, {i - 1, i}, {j, j}, 1.0, {}};
      --i;
    }
    a.ops.push_back(std::move(op));
  }
  std::reverse(a.ops.begin(), a.ops.end());
  tally(a);
  return a;
}

Alignment werd_align(const Tokens& hyp, const Tokens& ref, const VariantTable& table, CostMode cost) {
  const std::size_t n = hyp.size(), m = ref.size();
  const SpanPhrases hyp_spans(hyp, table);
  const SpanPhrases ref_spans(ref, table);

  // Variant pair aligning hyp[i-p, i) with ref[j-q, j), or null.
  auto variant = [&](std::size_t i, std::size_t j, std::size_t p, std::size_t q) -> const VariantPair* {
    if (!hyp_spans.listed[i - p][p - 1] || !ref_spans.listed[j - q][q - 1]) return nullptr;
    return table.find(hyp_spans.text[i - p][p - 1], ref_spans.text[j - q][q - 1]);
  };
  const bool use_variants = !table.empty();
  const std::size_t max_span = Phrase::kMaxTokens;

  Grid d(n + 1, m + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = std::numeric_limits<double>::infinity();
      if (i > 0 && j > 0) best = d(i - 1, j - 1) + (hyp[i - 1] == ref[j - 1] ? 0.0 : 1.0);
      if (j > 0) best = std::min(best, d(i, j - 1) + 1.0);
      if (i > 0) best = std::min(best, d(i - 1, j) + 1.0);
      if (use_variants) {
        for (std::size_t p = 1; p <= std::min(max_span, i); ++p)
          for (std::size_t q = 1; q <= std::min(max_span, j); ++q)
            if (const VariantPair* pair = variant(i, j, p, q))
              best = std::min(best, d(i - p, j - q) + cost.cost_of(*pair));
      }
      d(i, j) = best;
    }
  }

  Alignment a;
  a.hyp_len = n;
  a.ref_len = m;
  a.total_cost = d(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const double here = d(i, j);
    if (i > 0 && j > 0 && hyp[i - 1] == ref[j - 1] && same_cost(here, d(i - 1, j - 1))) {
      a.ops.push_back({OpKind::kMatch, {i - 1, i}, {j - 1, j}, 0.0, {}});
      --i, --j;
      continue;
    }
    bool took_variant = false;
    if (use_variants) {
      for (std::size_t p = 1; p <= std::min(max_span, i) && !took_variant; ++p) {
        for (std::size_t q = 1; q <= std::min(max_span, j); ++q) {
          const VariantPair* pair = variant(i, j, p, q);
          if (!pair) continue;
          const double c = cost.cost_of(*pair);
          if (!same_cost(here, d(i - p, j - q) + c)) continue;
          a.ops.push_back({OpKind::kVariant, {i - p, i}, {j - q, j}, c, *pair});
          i -= p, j -= q;
          took_variant = true;
          break;
        }
      }
    }
    if (took_variant) continue;
    if (i > 0 && j > 0 && hyp[i - 1] != ref[j - 1] && same_cost(here, d(i - 1, j - 1) + 1.0)) {
      a.ops.push_back({OpKind::kSub, {i - 1, i}, {j - 1, j}, 1.0, {}});
      --i, --j;
    } else if (j > 0 && same_cost(here, d(i, j - 1) + 1.0)) {
      a.ops.push_back({OpKind::kDel, {i, i}, {j - 1, j}, 1.0, {}});
      --j;
    } else {
      a.ops.push_back({OpKind::kIns, {i - 1, i}, {j, j}, 1.0, {}});
      --i;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  tally(a);
  return a;
}

double brute_force_align(const Tokens& hyp, const Tokens& ref, const VariantTable& table, CostMode cost) {
  constexpr std::size_t kMaxLen = 7;
  if (hyp.size() > kMaxLen || ref.size() > kMaxLen)
    throw std::invalid_argument("brute_force_align is limited to 7 tokens per side");
  const std::size_t n = hyp.size(), m = ref.size();

  struct Move {
    std::size_t p, q;
    double cost;
  };
  // Variant moves starting at (i, j), found by scanning every pair.
  std::vector<std::vector<Move>> moves((n + 1) * (m + 1));
  auto span_text = [](const Tokens& t, std::size_t from, std::size_t len) {
    return join(Tokens(t.begin() + static_cast<std::ptrdiff_t>(from),
                       t.begin() + static_cast<std::ptrdiff_t>(from + len)));
  };
  for (const VariantPair& pair : table.pairs()) {
    for (int orient = 0; orient < 2; ++orient) {
      const Phrase& x = orient == 0 ? pair.target : pair.source;
      const Phrase& y = orient == 0 ? pair.source : pair.target;
      for (std::size_t i = 0; i + x.size() <= n; ++i) {
        if (span_text(hyp, i, x.size()) != x.joined()) continue;
        for (std::size_t j = 0; j + y.size() <= m; ++j)
          if (span_text(ref, j, y.size()) == y.joined())
            moves[i * (m + 1) + j].push_back({x.size(), y.size(), cost.cost_of(pair)});
      }
    }
  }

  auto search = [&](auto&& self, std::size_t i, std::size_t j) -> double {
    if (i == n && j == m) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    if (i < n && j < m) best = std::min(best, (hyp[i] == ref[j] ? 0.0 : 1.0) + self(self, i + 1, j + 1));
    if (i < n) best = std::min(best, 1.0 + self(self, i + 1, j));
    if (j < m) best = std::min(best, 1.0 + self(self, i, j + 1));
    for (const Move& mv : moves[i * (m + 1) + j]) best = std::min(best, mv.cost + self(self, i + mv.p, j + mv.q));
    return best;
  };
  return search(search, 0, 0);
}

TerAlignment ter_align(const Tokens& hyp, const Tokens& ref) {
  constexpr std::size_t kMaxBlock = 10;
  Tokens cur = hyp;
  std::size_t shifts = 0;

  while (true) {
    const Alignment base = wer_align(cur, ref);
    const std::size_t base_errors = base.counts.errors();
    if (base_errors < 2) break;  // a shift costs 1 and must save more than that

    // Hyp cursor at each reference position; which tokens are matched.
    std::vector<std::size_t> cursor(ref.size() + 1, cur.size());
    std::vector<bool> hyp_ok(cur.size(), false), ref_ok(ref.size(), false);
    for (const EditOp& op : base.ops) {
      for (std::size_t r = op.ref.begin; r < op.ref.end; ++r) cursor[r] = op.hyp.begin;
      if (op.kind == OpKind::kMatch) {
        hyp_ok[op.hyp.begin] = true;
        ref_ok[op.ref.begin] = true;
      }
    }

    std::size_t best_errors = base_errors - 1;  // must beat errors - 1 after paying for the shift
    Tokens best;
    for (std::size_t s = 0; s < cur.size(); ++s) {
      for (std::size_t len = 1; len <= kMaxBlock && s + len <= cur.size(); ++len) {
        const bool block_ok = std::all_of(hyp_ok.begin() + static_cast<std::ptrdiff_t>(s),
                                          hyp_ok.begin() + static_cast<std::ptrdiff_t>(s + len), [](bool b) { return b; });
        if (block_ok) continue;
        for (std::size_t r = 0; r + len <= ref.size(); ++r) {
          if (!std::equal(cur.begin() + static_cast<std::ptrdiff_t>(s), cur.begin() + static_cast<std::ptrdiff_t>(s + len),
                          ref.begin() + static_cast<std::ptrdiff_t>(r)))
            continue;
          const bool dest_ok = std::all_of(ref_ok.begin() + static_cast<std::ptrdiff_t>(r),
                                           ref_ok.begin() + static_cast<std::ptrdiff_t>(r + len), [](bool b) { return b; });
          if (dest_ok) continue;
          for (std::size_t dest : {cursor[r], cursor[std::min(r + len, ref.size())]}) {
            if (dest >= s && dest <= s + len) continue;
            Tokens moved;
            moved.reserve(cur.size());
            const std::size_t insert_at = dest > s ? dest - len : dest;
            for (std::size_t k = 0; k < cur.size(); ++k)
              if (k < s || k >= s + len) moved.push_back(cur[k]);
            moved.insert(moved.begin() + static_cast<std::ptrdiff_t>(insert_at),
                         cur.begin() + static_cast<std::ptrdiff_t>(s), cur.begin() + static_cast<std::ptrdiff_t>(s + len));
            const std::size_t errors = wer_align(moved, ref).counts.errors();
            if (errors < best_errors) {
              best_errors = errors;
              best = std::move(moved);
            }
          }
        }
      }
    }
    if (best.empty()) break;
    cur = std::move(best);
    ++shifts;
  }

  TerAlignment result;
  result.alignment = wer_align(cur, ref);
  result.alignment.shifts = shifts;
  result.alignment.total_cost += static_cast<double>(shifts);
  result.shifted_hyp = std::move(cur);
  return result;
}

void render_alignment(std::ostream& out, std::string_view id, const Tokens& hyp, const Tokens& ref,
                      const Alignment& a) {
  auto words = [](const Tokens& t, Span s) {
    if (s.size() == 0) return std::string("*");
    return join(Tokens(t.begin() + static_cast<std::ptrdiff_t>(s.begin), t.begin() + static_cast<std::ptrdiff_t>(s.end)));
  };
  out << "# " << id << "\tcost=" << format_score(a.total_cost) << "\tref_len=" << a.ref_len
      << "\tins=" << a.counts.ins << "\tdel=" << a.counts.del << "\tsub=" << a.counts.sub
      << "\tvariant=" << a.counts.variant;
  if (a.shifts) out << "\tshifts=" << a.shifts;
  out << '\n';
  for (const EditOp& op : a.ops) {
    out << op_tag(op.kind) << '\t' << op.hyp.begin << ':' << op.hyp.end << '\t' << op.ref.begin << ':'
        << op.ref.end << '\t' << words(hyp, op.hyp) << '\t' << words(ref, op.ref);
    if (op.kind == OpKind::kVariant) out << '\t' << format_score(op.cost);
    out << '\n';
  }
  out << '\n';
}

}  // namespace werd
