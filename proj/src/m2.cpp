#include "uoterrant/m2.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "uoterrant/edit_extract.hpp"
#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

constexpr std::string_view kSep = "|||";

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(kSep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + kSep.size();
  }
}

long parse_int(std::string_view s, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
  }
  return value;
}

struct PendingEdit {
  Edit edit;
  std::size_t line;
};

struct PendingAnnotator {
  int id;
  std::vector<PendingEdit> edits;
};

class BlockBuilder {
 public:
  void start(TokenSeq source) {
    source_ = std::move(source);
    annotators_.clear();
    open_ = true;
  }
  bool open() const { return open_; }

  void add(int annotator, std::optional<PendingEdit> edit) {
    auto it = std::find_if(annotators_.begin(), annotators_.end(),
                           [&](const PendingAnnotator& a) { return a.id == annotator; });
    if (it == annotators_.end()) {
      annotators_.push_back({annotator, {}});
      it = std::prev(annotators_.end());
    }
    if (edit) it->edits.push_back(std::move(*edit));
  }

  M2Sentence finish() {
    M2Sentence out;
    out.source = std::move(source_);
    for (auto& a : annotators_) {
      std::vector<Edit> edits;
      for (auto& p : a.edits) {
        if (p.edit.end > out.source.size()) {
          throw ParseError("edit span " + describe(p.edit) + " exceeds the sentence", p.line);
        }
        edits.push_back(std::move(p.edit));
      }
      try {
        out.annotations.push_back({a.id, EditSet(std::move(edits))});
      } catch (const Error& e) {
        throw ParseError(e.what(), a.edits.empty() ? 0 : a.edits.front().line);
      }
    }
    open_ = false;
    return out;
  }

 private:
  TokenSeq source_;
  std::vector<PendingAnnotator> annotators_;
  bool open_ = false;
};

}  // namespace

std::vector<M2Sentence> parse_m2(std::istream& in) {
  std::vector<M2Sentence> out;
  BlockBuilder block;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (block.open()) out.push_back(block.finish());
      continue;
    }
    if (line.starts_with("S ") || line == "S") {
      if (block.open()) out.push_back(block.finish());
      block.start(tokenize(line.substr(1)));
      continue;
    }
    if (!line.starts_with("A ")) throw ParseError("expected an 'S' or 'A' record", line_no);
    if (!block.open()) throw ParseError("'A' record before any 'S' record", line_no);

    auto fields = split_fields(line.substr(2));
    if (fields.size() != 6) throw ParseError("an 'A' record needs 6 '|||'-separated fields", line_no);
    auto span = tokenize(fields[0]);
    if (span.size() != 2) throw ParseError("malformed span '" + std::string(fields[0]) + "'", line_no);
    long start = parse_int(span[0], line_no);
    long end = parse_int(span[1], line_no);
    int annotator = static_cast<int>(parse_int(fields[5], line_no));
    std::string type(fields[1]);

    if (start == -1 && end == -1) {
      block.add(annotator, std::nullopt);
      continue;
    }
    if (start < 0 || end < start) throw ParseError("invalid span " + std::to_string(start) + " " + std::to_string(end), line_no);
    Edit edit(static_cast<std::size_t>(start), static_cast<std::size_t>(end), tokenize(fields[2]), type);
    if (edit.is_insertion() && edit.replacement.empty()) throw ParseError("no-op edit", line_no);
    block.add(annotator, PendingEdit{std::move(edit), line_no});
  }
  if (block.open()) out.push_back(block.finish());
  return out;
}

std::vector<M2Sentence> parse_m2(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_m2(in);
}

void write_m2(std::ostream& out, const std::vector<M2Sentence>& sentences) {
  for (const auto& s : sentences) {
    out << "S " << detokenize(s.source) << '\n';
    for (const auto& a : s.annotations) {
      if (a.edits.empty()) {
        out << "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" << a.annotator << '\n';
        continue;
      }
      for (const auto& e : a.edits) {
        std::string type = e.type_label ? *e.type_label : classify_coarse(e, s.source);
        out << "A " << e.start << ' ' << e.end << kSep << type << kSep << detokenize(e.replacement) << kSep
            << "REQUIRED" << kSep << "-NONE-" << kSep << a.annotator << '\n';
      }
    }
    out << '\n';
  }
}

void write_m2(const std::filesystem::path& path, const std::vector<M2Sentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_m2(out, sentences);
}

}  // namespace uoterrant
