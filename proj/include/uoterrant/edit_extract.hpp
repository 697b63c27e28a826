#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uoterrant/textspan.hpp"

namespace uoterrant {

enum class OpKind { Match, Sub, Ins, Del, Transpose };

const char* to_string(OpKind kind);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct AlignmentOp {
  OpKind kind = OpKind::Match;
  Span src;
  Span tgt;
};

/// Normalized longest-common-subsequence similarity of two strings, in [0, 1].
double char_similarity(std::string_view a, std::string_view b);

/// Minimal-cost Damerau-Levenshtein alignment of two token sequences.
/// Costs: match 0, insert/delete 1, substitute 1 when the tokens differ only
/// in case and 2 - 0.5 * char_similarity otherwise, k-token transposition 1.
std::vector<AlignmentOp> align(const TokenSeq& src, const TokenSeq& tgt);

/// Collapses each maximal run of non-Match ops into one edit.
EditSet merge_ops(const std::vector<AlignmentOp>& ops, const TokenSeq& tgt);

EditSet extract_edits(std::string_view src_text, std::string_view cor_text);
EditSet extract_edits(const TokenSeq& src, const TokenSeq& cor);

/// Coarse error category: "ORTH", "PUNCT" or "OTHER".
std::string classify_coarse(const Edit& edit, const TokenSeq& src);

}  // namespace uoterrant
