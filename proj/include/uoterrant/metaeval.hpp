#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "uoterrant/embedder.hpp"

namespace uoterrant {

enum class Outcome { AWins, BWins, Tie };

const char* to_string(Outcome o);

struct Comparison {
  std::size_t sentence_id = 0;
  std::string system_a;
  std::string system_b;
  Outcome outcome = Outcome::Tie;
};

/// Sentence-level scores of one system, keyed by sentence id.
struct SystemScores {
  std::string system;
  std::map<std::size_t, double> by_sentence;
};

/// One comparison per sentence and unordered system pair; pairs follow the
/// input order of `systems` (a before b).
std::vector<Comparison> pairwise_outcomes(const std::vector<SystemScores>& systems, double tie_epsilon = 1e-9);

struct TrueSkillParams {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau = 25.0 / 300.0;
  double draw_probability = 0.10;
  std::uint64_t shuffle_seed = 0;

  void validate() const;
  /// Draw margin for a two-player match.
  double draw_margin() const;
};

struct SystemRating {
  std::string system;
  double mu = 0.0;
  double sigma = 0.0;
  double conservative() const { return mu - 3.0 * sigma; }
};

/// Sequential two-player TrueSkill over the comparisons, processed in a
/// seeded shuffle of (sentence, pair) order. Sorted by mu, highest first.
std::vector<SystemRating> trueskill_rank(const std::vector<Comparison>& comparisons, const TrueSkillParams& params = {});

struct SystemWinRate {
  std::string system;
  double score = 0.0;
};

/// (wins + ties/2) / comparisons, highest first.
std::vector<SystemWinRate> expected_wins(const std::vector<Comparison>& comparisons);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(const std::vector<double>& x);

struct PairAgreement {
  std::string system_a;
  std::string system_b;
  std::size_t sentences = 0;
  std::size_t agreed = 0;
  double rate() const { return sentences ? static_cast<double>(agreed) / static_cast<double>(sentences) : 0.0; }
};

struct AgreementMatrix {
  std::vector<std::string> systems;
  std::vector<PairAgreement> pairs;

  /// Rate for an unordered pair; throws NotFound for unknown or identical systems.
  double rate(const std::string& x, const std::string& y) const;
};

AgreementMatrix agreement_matrix(const std::vector<Comparison>& metric, const std::vector<Comparison>& human);

struct TypedVector {
  std::string type;
  EmbeddingVector vector;
};

struct NormStats {
  std::string type;
  double mean = 0.0;
  double stdev = 0.0;
  std::size_t count = 0;
};

/// Mean and population standard deviation of edit-vector norms per type,
/// ascending by mean.
std::vector<NormStats> norm_stats_by_type(const std::vector<TypedVector>& vectors);

}  // namespace uoterrant
