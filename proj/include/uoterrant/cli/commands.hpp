#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uoterrant/cli/config.hpp"
#include "uoterrant/errors.hpp"
#include "uoterrant/metaeval.hpp"
#include "uoterrant/scoring.hpp"

namespace uoterrant::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDependency = 3;

inline constexpr const char* kReportFormat = "uot-errant-report/v1";
inline constexpr const char* kRankingFormat = "uot-errant-ranking/v1";

using Path = std::filesystem::path;

/// Where the sentences come from. Text files are line-aligned; M2 files
/// supply pre-extracted edits and take precedence over extraction.
struct CorpusOptions {
  std::optional<Path> src;
  std::optional<Path> hyp;
  std::vector<Path> refs;
  std::optional<Path> hyp_m2;
  std::optional<Path> ref_m2;
};

/// Raised for unusable command input; maps to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> read_lines(const Path& path);
std::vector<SentenceInput> load_corpus(const CorpusOptions& opts, bool require_refs = true);

struct ExtractOptions {
  Path src;
  Path cor;
  std::optional<Path> m2_out;
};
int cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err);

enum class EnumerateMode { Remove, Add, Both };

struct EnumerateOptions {
  CorpusOptions corpus;
  EnumerateMode mode = EnumerateMode::Remove;
};
/// Deduplicated, in order of first use.
std::vector<std::string> enumerate_sentences(const std::vector<SentenceInput>& corpus, EnumerateMode mode,
                                             bool include_originals = true);
int cmd_enumerate(const EnumerateOptions& opts, std::ostream& out, std::ostream& err);

struct ScoreOptions {
  CorpusOptions corpus;
  RunConfig config;
  std::optional<Path> plans_out;
  bool errant_baseline = false;
  std::size_t workers = 1;
};
/// Scores every sentence; results are ordered by sentence index.
std::vector<SentenceScore> score_corpus(const std::vector<SentenceInput>& corpus, const ScoringConfig& cfg,
                                        std::size_t workers);
nlohmann::json score_report(const std::vector<SentenceScore>& scores, const std::vector<SentenceScore>* errant,
                            const RunConfig& cfg, const std::vector<std::string>& warnings);
void write_plans_tsv(std::ostream& out, const std::vector<SentenceScore>& scores);
int cmd_score(const ScoreOptions& opts, std::ostream& out, std::ostream& err);

enum class RankMethod { TrueSkill, ExpectedWins };

struct RankOptions {
  std::vector<Path> scores;
  std::vector<std::string> names;
  RankMethod method = RankMethod::TrueSkill;
  std::optional<std::uint64_t> seed;
  std::optional<double> tie_epsilon;
};
/// Reads per-sentence F values from a score report.
SystemScores read_report_scores(const Path& path, const std::string& system);
int cmd_rank(const RankOptions& opts, std::ostream& out, std::ostream& err);

struct CorrelateOptions {
  Path ranking;
  Path human;
};
int cmd_correlate(const CorrelateOptions& opts, std::ostream& out, std::ostream& err);

struct AgreementOptions {
  std::vector<Path> metric_scores;
  std::vector<std::string> names;
  Path human;
  double tie_epsilon = 1e-9;
};
void write_agreement_tsv(std::ostream& out, const AgreementMatrix& m);
int cmd_agreement(const AgreementOptions& opts, std::ostream& out, std::ostream& err);

struct NormsOptions {
  CorpusOptions corpus;
  RunConfig config;
};
int cmd_norms(const NormsOptions& opts, std::ostream& out, std::ostream& err);

/// Human judgments as TSV: "system<TAB>sentence<TAB>score" per sentence, or
/// "system<TAB>score" per system. '#' lines and a non-numeric header are skipped.
struct HumanScores {
  std::vector<SystemScores> per_sentence;  // empty for system-level files
  std::vector<std::pair<std::string, double>> per_system;
};
HumanScores read_human_tsv(const Path& path);

}  // namespace uoterrant::cli
