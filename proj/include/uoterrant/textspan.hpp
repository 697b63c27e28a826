#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uoterrant {

using TokenSeq = std::vector<std::string>;

/// A span replacement over source tokens: tokens [start, end) become
/// `replacement`. start == end is a pure insertion.
struct Edit {
  std::size_t start = 0;
  std::size_t end = 0;
  TokenSeq replacement;
  std::optional<std::string> type_label;

  Edit() = default;
  Edit(std::size_t s, std::size_t e, TokenSeq repl, std::optional<std::string> type = std::nullopt)
      : start(s), end(e), replacement(std::move(repl)), type_label(std::move(type)) {}

  bool is_insertion() const { return start == end; }

  // Identity ignores the type label.
  bool same_change(const Edit& other) const {
    return start == other.start && end == other.end && replacement == other.replacement;
  }
  friend bool operator==(const Edit& a, const Edit& b) { return a.same_change(b); }
};

/// "start:end:replacement" with replacement tokens joined by single spaces.
std::string describe(const Edit& edit);

/// Convenience for fixtures: replacement text is whitespace-tokenized.
Edit make_edit(std::size_t start, std::size_t end, std::string_view replacement);

/// Non-overlapping edits sorted by (start, end). Construction validates and
/// sorts; a set that exists is always well-formed.
class EditSet {
 public:
  EditSet() = default;
  explicit EditSet(std::vector<Edit> edits);

  const std::vector<Edit>& edits() const { return edits_; }
  std::size_t size() const { return edits_.size(); }
  bool empty() const { return edits_.empty(); }
  const Edit& operator[](std::size_t i) const { return edits_[i]; }
  auto begin() const { return edits_.begin(); }
  auto end() const { return edits_.end(); }

  /// Index of the edit with the same span and replacement, if any.
  std::optional<std::size_t> find(const Edit& edit) const;

  /// Throws OutOfRange if any span exceeds a source of `source_len` tokens.
  void check_against(std::size_t source_len) const;

  EditSet without(std::size_t index) const;

  friend bool operator==(const EditSet& a, const EditSet& b) { return a.edits_ == b.edits_; }

 private:
  std::vector<Edit> edits_;
};

TokenSeq tokenize(std::string_view text);
std::string detokenize(const TokenSeq& tokens);

/// Applies all edits simultaneously in source coordinates.
TokenSeq apply_edits(const TokenSeq& src, const EditSet& edits);

/// apply_edits(src, edits minus `omit`). Throws NotFound if `omit` is absent.
TokenSeq apply_edits_excluding(const TokenSeq& src, const EditSet& edits, const Edit& omit);

}  // namespace uoterrant
