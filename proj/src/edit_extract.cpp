#include "uoterrant/edit_extract.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace uoterrant {

namespace {

constexpr double kNoCost = std::numeric_limits<double>::infinity();
constexpr double kTieSlack = 1e-9;

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double substitution_cost(const std::string& a, const std::string& b) {
  if (lower(a) == lower(b)) return 1.0;
  return 2.0 - 0.5 * char_similarity(a, b);
}

// Tokens src[i-k, i) and tgt[j-k, j) are a reordering of each other (case-insensitive)
// without being identical.
bool is_transposition(const TokenSeq& src, const TokenSeq& tgt, std::size_t i, std::size_t j, std::size_t k) {
  std::vector<std::string> a, b;
  bool identical = true;
  for (std::size_t t = 0; t < k; ++t) {
    a.push_back(lower(src[i - k + t]));
    b.push_back(lower(tgt[j - k + t]));
    identical = identical && src[i - k + t] == tgt[j - k + t];
  }
  if (identical) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

bool is_punct_token(const std::string& tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Match: return "Match";
    case OpKind::Sub: return "Sub";
    case OpKind::Ins: return "Ins";
    case OpKind::Del: return "Del";
    case OpKind::Transpose: return "Transpose";
  }
  return "?";
}

double char_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return 2.0 * static_cast<double>(prev[b.size()]) / static_cast<double>(a.size() + b.size());
}

std::vector<AlignmentOp> align(const TokenSeq& src, const TokenSeq& tgt) {
  const std::size_t n = src.size();
  const std::size_t m = tgt.size();
  std::vector<std::vector<double>> cost(n + 1, std::vector<double>(m + 1, kNoCost));
  cost[0][0] = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = kNoCost;
      if (i > 0) best = std::min(best, cost[i - 1][j] + 1.0);
      if (j > 0) best = std::min(best, cost[i][j - 1] + 1.0);
      if (i > 0 && j > 0) {
        double diag = src[i - 1] == tgt[j - 1] ? 0.0 : substitution_cost(src[i - 1], tgt[j - 1]);
        best = std::min(best, cost[i - 1][j - 1] + diag);
        for (std::size_t k = 2; k <= std::min(i, j); ++k) {
          if (is_transposition(src, tgt, i, j, k)) best = std::min(best, cost[i - k][j - k] + 1.0);
        }
      }
      cost[i][j] = best;
    }
  }

  // Backtrace from the end. Preference on ties: match, transposition,
  // substitution, deletion, insertion.
  std::vector<AlignmentOp> ops;
  std::size_t i = n, j = m;
  auto near = [](double x, double y) { return std::abs(x - y) <= kTieSlack; };
  while (i > 0 || j > 0) {
    const double here = cost[i][j];
    if (i > 0 && j > 0 && src[i - 1] == tgt[j - 1] && near(cost[i - 1][j - 1], here)) {
      ops.push_back({OpKind::Match, {i - 1, i}, {j - 1, j}});
      --i, --j;
      continue;
    }
    bool moved = false;
    for (std::size_t k = 2; i > 0 && j > 0 && k <= std::min(i, j); ++k) {
      if (is_transposition(src, tgt, i, j, k) && near(cost[i - k][j - k] + 1.0, here)) {
        ops.push_back({OpKind::Transpose, {i - k, i}, {j - k, j}});
        i -= k, j -= k;
        moved = true;
        break;
      }
    }
    if (moved) continue;
    if (i > 0 && j > 0 && src[i - 1] != tgt[j - 1] &&
        near(cost[i - 1][j - 1] + substitution_cost(src[i - 1], tgt[j - 1]), here)) {
      ops.push_back({OpKind::Sub, {i - 1, i}, {j - 1, j}});
      --i, --j;
    } else if (i > 0 && near(cost[i - 1][j] + 1.0, here)) {
      ops.push_back({OpKind::Del, {i - 1, i}, {j, j}});
      --i;
    } else {
      ops.push_back({OpKind::Ins, {i, i}, {j - 1, j}});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

EditSet merge_ops(const std::vector<AlignmentOp>& ops, const TokenSeq& tgt) {
  std::vector<Edit> edits;
  std::size_t k = 0;
  while (k < ops.size()) {
    if (ops[k].kind == OpKind::Match) {
      ++k;
      continue;
    }
    const std::size_t src_start = ops[k].src.start;
    const std::size_t tgt_start = ops[k].tgt.start;
    std::size_t src_end = ops[k].src.end;
    std::size_t tgt_end = ops[k].tgt.end;
    while (k < ops.size() && ops[k].kind != OpKind::Match) {
      src_end = ops[k].src.end;
      tgt_end = ops[k].tgt.end;
      ++k;
    }
    TokenSeq repl(tgt.begin() + static_cast<std::ptrdiff_t>(tgt_start),
                  tgt.begin() + static_cast<std::ptrdiff_t>(tgt_end));
    edits.emplace_back(src_start, src_end, std::move(repl));
  }
  return EditSet(std::move(edits));
}

EditSet extract_edits(const TokenSeq& src, const TokenSeq& cor) { return merge_ops(align(src, cor), cor); }

EditSet extract_edits(std::string_view src_text, std::string_view cor_text) {
  return extract_edits(tokenize(src_text), tokenize(cor_text));
}

std::string classify_coarse(const Edit& edit, const TokenSeq& src) {
  TokenSeq original(src.begin() + static_cast<std::ptrdiff_t>(edit.start),
                    src.begin() + static_cast<std::ptrdiff_t>(edit.end));
  std::string before, after;
  for (const auto& t : original) before += lower(t);
  for (const auto& t : edit.replacement) after += lower(t);
  if (before == after) return "ORTH";

  bool all_punct = true;
  for (const auto& t : original) all_punct = all_punct && is_punct_token(t);
  for (const auto& t : edit.replacement) all_punct = all_punct && is_punct_token(t);
  return all_punct ? "PUNCT" : "OTHER";
}

}  // namespace uoterrant
