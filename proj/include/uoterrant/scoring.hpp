#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uoterrant/editvec.hpp"
#include "uoterrant/embedder.hpp"
#include "uoterrant/textspan.hpp"
#include "uoterrant/uot.hpp"

namespace uoterrant {

enum class DegenerateCase { BothEmpty, HypEmpty, RefEmpty };

const char* to_string(DegenerateCase c);

struct Decomposition {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  // Before clamping at zero; tp + fp_raw == sum(a) and tp + fn_raw == sum(b).
  double fp_raw = 0.0;
  double fn_raw = 0.0;
  bool fp_clamped = false;
  bool fn_clamped = false;
};

Decomposition decompose(const TransportPlan& plan, const std::vector<double>& a, const std::vector<double>& b);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

Prf prf(double tp, double fp, double fn, double beta = 0.5);

struct SentenceScore {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  std::size_t chosen_ref = 0;
  std::optional<DegenerateCase> degenerate_case;
  bool converged = true;
  bool fp_clamped = false;
  bool fn_clamped = false;
  double fp_raw = 0.0;
  double fn_raw = 0.0;
  // Only for UOT scores that went through the solver.
  std::optional<TransportPlan> plan;
  std::vector<double> hyp_masses;
  std::vector<double> ref_masses;
  EditSet hyp_edits;
  EditSet ref_edits;
};

struct ScoringConfig {
  std::shared_ptr<const EmbeddingProvider> provider;
  VectorizeMode vectorize = VectorizeMode::Remove;
  MassMode mass = MassMode::L2Norm;
  CostMode cost = CostMode::Euclidean;
  UotConfig uot;
  double beta = 0.5;
  bool keep_plan = false;
};

/// A reference given either as corrected text or as pre-extracted edits.
struct SentenceInput {
  TokenSeq source;
  EditSet hyp;
  std::vector<EditSet> refs;
};

SentenceInput make_input(const std::string& src, const std::string& hyp, const std::vector<std::string>& refs);

/// UOT-based score against each reference; keeps the best F (lowest index on ties).
SentenceScore sentence_score_uot(const SentenceInput& input, const ScoringConfig& cfg);

/// Exact-match edit overlap with the same conventions and reference choice.
SentenceScore sentence_score_errant(const SentenceInput& input, double beta = 0.5);

struct CorpusSummary {
  std::size_t sentences = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f = 0.0;
  double total_tp = 0.0;
  double total_fp = 0.0;
  double total_fn = 0.0;
  std::size_t both_empty = 0;
  std::size_t hyp_empty = 0;
  std::size_t ref_empty = 0;
  std::size_t non_converged = 0;
  std::size_t fp_clamped = 0;
  std::size_t fn_clamped = 0;
};

CorpusSummary corpus_report(const std::vector<SentenceScore>& scores);

}  // namespace uoterrant
