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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "werd/textnorm.hpp"
#include "werd/variants.hpp"

namespace werd {

enum class OpKind { kMatch, kSub, kIns, kDel, kVariant };

/// C/S/I/D/V.
char op_tag(OpKind kind);

/// Half-open token index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct EditOp {
  OpKind kind = OpKind::kMatch;
  Span hyp;
  Span ref;
  double cost = 0.0;
  std::optional<VariantPair> pair;  // kVariant only
};

struct OpCounts {
  std::size_t match = 0;
  std::size_t sub = 0;
  std::size_t ins = 0;
  std::size_t del = 0;
  std::size_t variant = 0;

  std::size_t errors() const noexcept { return sub + ins + del; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

/// A monotonic edit script; op spans tile both sequences in order.
struct Alignment {
  std::vector<EditOp> ops;
  double total_cost = 0.0;
  OpCounts counts;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  /// Block shifts applied before alignment (TER only); included in total_cost.
  std::size_t shifts = 0;
};

/// What a VARIANT operation costs.
class CostMode {
 public:
  enum class Kind { kTable, kZero, kConst };

  static CostMode table() { return CostMode(Kind::kTable, 0.0); }
  static CostMode zero() { return CostMode(Kind::kZero, 0.0); }
  /// Throws std::invalid_argument unless c is finite and >= 0.
  static CostMode constant(double c);
  /// "table", "zero" or "const:<x>".
  static CostMode parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double cost_of(const VariantPair& pair) const noexcept;
  std::string to_string() const;

 private:
  CostMode(Kind kind, double c) : kind_(kind), constant_(c) {}
  Kind kind_;
  double constant_;
};

/// Plain word alignment: unit INS/DEL/SUB, free MATCH. At equal cost the
/// backtrace prefers MATCH, then SUB, then DEL, then INS.
Alignment wer_align(const Tokens& hyp, const Tokens& ref);

/// WER alignment extended with VARIANT moves: a hypothesis span and a
/// reference span of 1-4 tokens each may be aligned as one operation when the
/// two phrases form a pair in `table`. Minimal total cost over all monotonic
/// alignments; ties prefer MATCH, VARIANT, SUB, DEL, INS in that order.
Alignment werd_align(const Tokens& hyp, const Tokens& ref, const VariantTable& table,
                     CostMode cost = CostMode::table());

struct TerAlignment {
  Alignment alignment;  // against shifted_hyp; total_cost counts the shifts
  Tokens shifted_hyp;
};

/// Greedy block-shift search (TER style): repeatedly applies the shift of a
/// hypothesis block onto a matching, currently misaligned reference span that
/// most lowers edits + 1, until no shift helps. Blocks span at most 10 words.
TerAlignment ter_align(const Tokens& hyp, const Tokens& ref);

/// Exhaustive search over every monotonic move sequence. Test oracle for
/// werd_align; throws std::invalid_argument if either side exceeds 7 tokens.
double brute_force_align(const Tokens& hyp, const Tokens& ref, const VariantTable& table, CostMode cost);

/// Writes one alignment in the line-oriented dump format:
///
///   # <id>\tcost=<c>\tref_len=<n>\tins=<i>\tdel=<d>\tsub=<s>\tvariant=<v>
///   <C|S|I|D|V>\t<h0>:<h1>\t<r0>:<r1>\t<hyp words or *>\t<ref words or *>[\t<variant cost>]
///
/// followed by a blank line.
void render_alignment(std::ostream& out, std::string_view id, const Tokens& hyp, const Tokens& ref,
                      const Alignment& alignment);

}  // namespace werd
