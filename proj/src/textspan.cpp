#include "uoterrant/textspan.hpp"

#include <algorithm>
#include <cctype>

#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string describe(const Edit& edit) {
  return std::to_string(edit.start) + ":" + std::to_string(edit.end) + ":" + detokenize(edit.replacement);
}

Edit make_edit(std::size_t start, std::size_t end, std::string_view replacement) {
  return Edit(start, end, tokenize(replacement));
}

EditSet::EditSet(std::vector<Edit> edits) : edits_(std::move(edits)) {
  for (const auto& e : edits_) {
    if (e.end < e.start) {
      throw InvalidEdit("edit " + describe(e) + " has end before start");
    }
    if (e.is_insertion() && e.replacement.empty()) {
      throw InvalidEdit("edit " + describe(e) + " is a no-op");
    }
    for (const auto& tok : e.replacement) {
      if (tok.empty() || std::any_of(tok.begin(), tok.end(), is_space)) {
        throw InvalidEdit("edit " + describe(e) + " has a malformed replacement token");
      }
    }
  }
  std::stable_sort(edits_.begin(), edits_.end(), [](const Edit& a, const Edit& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  for (std::size_t i = 1; i < edits_.size(); ++i) {
    const Edit& prev = edits_[i - 1];
    const Edit& next = edits_[i];
    bool overlap = prev.end > next.start;
    // Two edits anchored at the same point cannot be ordered unambiguously.
    bool double_insert = prev.is_insertion() && next.is_insertion() && prev.start == next.start;
    if (overlap || double_insert) {
      throw OverlapError("edits " + describe(prev) + " and " + describe(next) + " overlap");
    }
  }
}

std::optional<std::size_t> EditSet::find(const Edit& edit) const {
  for (std::size_t i = 0; i < edits_.size(); ++i) {
    if (edits_[i].same_change(edit)) return i;
  }
  return std::nullopt;
}

void EditSet::check_against(std::size_t source_len) const {
  for (const auto& e : edits_) {
    if (e.end > source_len) {
      throw OutOfRange("edit " + describe(e) + " exceeds source length " + std::to_string(source_len));
    }
  }
}

EditSet EditSet::without(std::size_t index) const {
  EditSet out;
  out.edits_.reserve(edits_.size() - 1);
  for (std::size_t i = 0; i < edits_.size(); ++i) {
    if (i != index) out.edits_.push_back(edits_[i]);
  }
  return out;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string detokenize(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSeq apply_edits(const TokenSeq& src, const EditSet& edits) {
  edits.check_against(src.size());
  TokenSeq out;
  std::size_t cursor = 0;
  for (const auto& e : edits) {
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor),
               src.begin() + static_cast<std::ptrdiff_t>(e.start));
    out.insert(out.end(), e.replacement.begin(), e.replacement.end());
    cursor = e.end;
  }
  out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor), src.end());
  return out;
}

TokenSeq apply_edits_excluding(const TokenSeq& src, const EditSet& edits, const Edit& omit) {
  auto idx = edits.find(omit);
  if (!idx) throw NotFound("edit " + describe(omit) + " is not in the edit set");
  return apply_edits(src, edits.without(*idx));
}

}  // namespace uoterrant
