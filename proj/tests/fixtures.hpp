#pragma once

#include <random>
#include <string>
#include <vector>

#include "uoterrant/textspan.hpp"

namespace uoterrant::fixtures {

// Learner sentence with four hypothesis edits and three reference edits.
inline const std::string kCaseSource =
    "It is still early for parents to decide whether they can foster a new life that are not able to work and "
    "may suffer the pain in the entire life .";
inline const std::string kCaseReference =
    "It is still early for parents to decide whether they can foster a new life that is not able to work and "
    "may suffer their entire life .";
inline const std::string kCaseHypothesis =
    "It is still early for parents to decide whether they can foster a new life that is not able to work and "
    "may suffer pain throughout their life .";

// Edit sets as produced by the reference extraction toolkit for this pair.
inline EditSet case_hyp_edits() {
  return EditSet({make_edit(16, 17, "is"), make_edit(24, 25, ""), make_edit(26, 27, "throughout"),
                  make_edit(27, 29, "their")});
}
inline EditSet case_ref_edits() {
  return EditSet({make_edit(16, 17, "is"), make_edit(24, 27, ""), make_edit(27, 28, "their")});
}

inline const std::vector<std::string> kVocab = {"the", "a", "cat", "dog", "sat", "on", "mat", "is", "are", "was",
                                                "big", "small", "red", "ran", "runs", "to", "of", ",", ".", "and"};

inline TokenSeq random_sentence(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, kVocab.size() - 1);
  TokenSeq out(len(rng));
  for (auto& t : out) t = kVocab[pick(rng)];
  return out;
}

/// Random well-formed edit set over a source of length n.
inline EditSet random_edits(std::mt19937_64& rng, std::size_t n, std::size_t max_edits = 4) {
  std::uniform_int_distribution<std::size_t> pick(0, kVocab.size() - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::vector<Edit> edits;
  std::size_t pos = 0;
  while (pos <= n && edits.size() < max_edits) {
    std::uniform_int_distribution<std::size_t> gap(0, 2);
    pos += gap(rng);
    if (pos > n) break;
    std::size_t span = std::min<std::size_t>(coin(rng) % 3, n - pos);
    TokenSeq repl;
    std::size_t repl_len = coin(rng) % 3;
    if (span == 0 && repl_len == 0) repl_len = 1;
    for (std::size_t k = 0; k < repl_len; ++k) repl.push_back(kVocab[pick(rng)]);
    edits.emplace_back(pos, pos + span, repl);
    // Keep insertions from sharing an anchor with the next edit.
    pos += span + 1;
  }
  return EditSet(std::move(edits));
}

}  // namespace uoterrant::fixtures
