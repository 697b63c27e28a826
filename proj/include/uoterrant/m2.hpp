#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "uoterrant/textspan.hpp"

namespace uoterrant {

struct M2Annotation {
  int annotator = 0;
  EditSet edits;
};

/// One "S ..." block with its edits grouped per annotator, in order of first
/// appearance. A noop record yields an annotator with an empty edit set.
struct M2Sentence {
  TokenSeq source;
  std::vector<M2Annotation> annotations;
};

std::vector<M2Sentence> parse_m2(std::istream& in);
std::vector<M2Sentence> parse_m2(const std::filesystem::path& path);

/// Edits without a type label are written with their coarse class.
void write_m2(std::ostream& out, const std::vector<M2Sentence>& sentences);
void write_m2(const std::filesystem::path& path, const std::vector<M2Sentence>& sentences);

}  // namespace uoterrant
