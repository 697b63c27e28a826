#include "uoterrant/scoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "uoterrant/errors.hpp"

using namespace uoterrant;

namespace {

ScoringConfig default_config() {
  ScoringConfig cfg;
  cfg.provider = std::make_shared<TestEmbedder>();
  return cfg;
}

double total(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

}  // namespace

TEST(Decompose, HandComputedExamples) {
  TransportPlan plan;
  plan.T = Matrix(2, 1);
  plan.T(0, 0) = 0.8;
  plan.T(1, 0) = 0.1;
  auto d = decompose(plan, {1.0, 1.0}, {1.0});
  EXPECT_NEAR(d.tp, 0.9, 1e-15);
  EXPECT_NEAR(d.fp, 1.1, 1e-15);
  EXPECT_NEAR(d.fn, 0.1, 1e-15);
  EXPECT_FALSE(d.fp_clamped);

  plan.T = Matrix(2, 1);
  d = decompose(plan, {1.0, 2.0}, {0.5});
  EXPECT_EQ(d.tp, 0.0);
  EXPECT_EQ(d.fp, 3.0);
  EXPECT_EQ(d.fn, 0.5);
}

TEST(Decompose, OverTransportIsClampedAndFlagged) {
  TransportPlan plan;
  plan.T = Matrix(1, 1, 1.2);
  auto d = decompose(plan, {1.0}, {1.5});
  EXPECT_EQ(d.fp, 0.0);
  EXPECT_TRUE(d.fp_clamped);
  EXPECT_NEAR(d.fp_raw, -0.2, 1e-15);
  EXPECT_NEAR(d.fn, 0.3, 1e-15);
  EXPECT_FALSE(d.fn_clamped);
}

TEST(Decompose, ShapeMustMatch) {
  TransportPlan plan;
  plan.T = Matrix(2, 2);
  EXPECT_THROW(decompose(plan, {1.0}, {1.0, 1.0}), ShapeMismatch);
}

TEST(Prf, KnownValuesAndConventions) {
  auto p = prf(1, 0, 0);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 1.0);
  EXPECT_EQ(p.f, 1.0);

  p = prf(0.9, 1.1, 0.1, 0.5);
  EXPECT_NEAR(p.precision, 0.45, 1e-15);
  EXPECT_NEAR(p.recall, 0.9, 1e-15);
  EXPECT_NEAR(p.f, 1.25 * 0.45 * 0.9 / (0.25 * 0.45 + 0.9), 1e-15);
  EXPECT_NEAR(p.f, 0.5, 1e-12);

  EXPECT_EQ(prf(0, 0, 0).f, 1.0);
  auto no_hyp = prf(0, 0, 2);
  EXPECT_EQ(no_hyp.precision, 1.0);
  EXPECT_EQ(no_hyp.recall, 0.0);
  EXPECT_EQ(no_hyp.f, 0.0);
  EXPECT_EQ(prf(0, 1, 1).f, 0.0);
}

TEST(Prf, EqualPrecisionAndRecallGiveThatValueForAnyBeta) {
  for (double beta : {0.25, 0.5, 1.0, 2.0}) EXPECT_NEAR(prf(3, 1, 1, beta).f, 0.75, 1e-15);
}

TEST(Prf, FIsIncreasingInTpWithPredictedAndGoldTotalsFixed) {
  for (double A : {0.5, 1.0, 3.0}) {
    for (double B : {0.5, 2.0}) {
      double prev = -1.0;
      for (int k = 1; k <= 50; ++k) {
        const double tp = std::min(A, B) * k / 50.0;
        const double f = prf(tp, A - tp, B - tp).f;
        EXPECT_GT(f, prev);
        EXPECT_NEAR(f, 1.25 * tp / (0.25 * B + A), 1e-12);
        prev = f;
      }
    }
  }
}

TEST(SentenceScoreUot, DegenerateCasesBypassTheSolver) {
  auto cfg = default_config();
  auto both = sentence_score_uot(make_input("a b c", "a b c", {"a b c"}), cfg);
  EXPECT_EQ(both.degenerate_case, DegenerateCase::BothEmpty);
  EXPECT_EQ(both.f_beta, 1.0);

  auto hyp_empty = sentence_score_uot(make_input("a b c", "a b c", {"a x c"}), cfg);
  EXPECT_EQ(hyp_empty.degenerate_case, DegenerateCase::HypEmpty);
  EXPECT_EQ(hyp_empty.tp, 0.0);
  EXPECT_EQ(hyp_empty.fp, 0.0);
  EXPECT_NEAR(hyp_empty.fn, total(hyp_empty.ref_masses), 1e-15);
  EXPECT_GT(hyp_empty.fn, 0.0);
  EXPECT_EQ(hyp_empty.f_beta, 0.0);
  EXPECT_FALSE(hyp_empty.plan.has_value());

  auto ref_empty = sentence_score_uot(make_input("a b c", "a x c", {"a b c"}), cfg);
  EXPECT_EQ(ref_empty.degenerate_case, DegenerateCase::RefEmpty);
  EXPECT_EQ(ref_empty.tp, 0.0);
  EXPECT_EQ(ref_empty.fn, 0.0);
  EXPECT_GT(ref_empty.fp, 0.0);
  EXPECT_EQ(ref_empty.f_beta, 0.0);
}

TEST(SentenceScoreUot, IdenticalEditsScoreNearOne) {
  auto cfg = default_config();
  cfg.keep_plan = true;
  auto s = sentence_score_uot(make_input("he go to school yesterday", "he went to the school yesterday",
                                         {"he went to the school yesterday"}),
                              cfg);
  EXPECT_FALSE(s.degenerate_case.has_value());
  EXPECT_GE(s.f_beta, 0.99);
  ASSERT_TRUE(s.plan.has_value());
  EXPECT_EQ(s.hyp_edits, s.ref_edits);
}

TEST(SentenceScoreUot, PicksTheBestReferenceLowestIndexOnTies) {
  auto cfg = default_config();
  auto in = make_input("the cat sit on mat", "the cat sits on the mat", {"a cat sat on mat", "the cat sits on the mat"});
  auto s = sentence_score_uot(in, cfg);
  EXPECT_EQ(s.chosen_ref, 1u);
  EXPECT_GE(s.f_beta, 0.99);

  auto tie = make_input("the cat sit on mat", "the cat sits on mat", {"the cat sits on mat", "the cat sits on mat"});
  EXPECT_EQ(sentence_score_uot(tie, cfg).chosen_ref, 0u);
}

TEST(SentenceScoreUot, RequiresReferencesAndProvider) {
  auto in = make_input("a b", "a c", {});
  EXPECT_THROW(sentence_score_uot(in, default_config()), Error);
  ScoringConfig no_provider;
  EXPECT_THROW(sentence_score_uot(make_input("a b", "a c", {"a d"}), no_provider), Error);
}

TEST(SentenceScoreUot, AccountingIdentitiesHoldBeforeClamping) {
  auto cfg = default_config();
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    SentenceInput in;
    in.source = fixtures::random_sentence(rng, 3, 12);
    in.hyp = fixtures::random_edits(rng, in.source.size(), 3);
    in.refs = {fixtures::random_edits(rng, in.source.size(), 3)};
    auto s = sentence_score_uot(in, cfg);
    if (s.degenerate_case) continue;
    // Equal up to the rounding of one subtraction at the larger magnitude.
    const double sa = total(s.hyp_masses), sb = total(s.ref_masses);
    EXPECT_NEAR(s.tp + s.fp_raw, sa, 4e-16 * std::max(s.tp, sa));
    EXPECT_NEAR(s.tp + s.fn_raw, sb, 4e-16 * std::max(s.tp, sb));
    EXPECT_GE(s.fp, 0.0);
    EXPECT_GE(s.fn, 0.0);
    EXPECT_EQ(s.fp_clamped, s.fp_raw < 0.0);
    EXPECT_EQ(s.fn_clamped, s.fn_raw < 0.0);
    EXPECT_GE(s.f_beta, 0.0);
    EXPECT_LE(s.f_beta, 1.0);
  }
}

TEST(SentenceScoreUot, NearMissGetsPartialCreditWhereExactMatchingGivesNone) {
  auto cfg = default_config();
  SentenceInput in;
  in.source = tokenize("she walk to the market every day");
  in.hyp = EditSet({make_edit(1, 2, "walked")});
  in.refs = {EditSet({make_edit(1, 2, "walks")})};
  auto soft = sentence_score_uot(in, cfg);
  auto hard = sentence_score_errant(in);
  EXPECT_GT(soft.f_beta, 0.0);
  EXPECT_EQ(hard.f_beta, 0.0);
}

TEST(SentenceScoreErrant, CaseStudyCounts) {
  SentenceInput in;
  in.source = tokenize(fixtures::kCaseSource);
  in.hyp = fixtures::case_hyp_edits();
  in.refs = {fixtures::case_ref_edits()};
  auto s = sentence_score_errant(in);
  EXPECT_EQ(s.tp, 1.0);
  EXPECT_EQ(s.fp, 3.0);
  EXPECT_EQ(s.fn, 2.0);
}

TEST(SentenceScoreErrant, IdenticalAndDisjointSets) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    SentenceInput in;
    in.source = fixtures::random_sentence(rng, 3, 10);
    in.hyp = fixtures::random_edits(rng, in.source.size(), 3);
    if (in.hyp.empty()) continue;
    in.refs = {in.hyp};
    auto s = sentence_score_errant(in);
    EXPECT_EQ(s.tp, static_cast<double>(in.hyp.size()));
    EXPECT_EQ(s.f_beta, 1.0);
  }
  SentenceInput disjoint;
  disjoint.source = tokenize("a b c d");
  disjoint.hyp = EditSet({make_edit(0, 1, "x")});
  disjoint.refs = {EditSet({make_edit(2, 3, "y")})};
  EXPECT_EQ(sentence_score_errant(disjoint).f_beta, 0.0);
}

TEST(CorpusReport, MeansAndCounts) {
  EXPECT_EQ(corpus_report({}).sentences, 0u);
  EXPECT_EQ(corpus_report({}).mean_f, 0.0);

  SentenceScore a, b, c;
  a.f_beta = 1.0;
  a.precision = 1.0;
  a.degenerate_case = DegenerateCase::BothEmpty;
  b.f_beta = 0.5;
  b.tp = 2.0;
  b.fp_clamped = true;
  b.converged = false;
  c.f_beta = 0.0;
  c.fn = 1.5;
  c.degenerate_case = DegenerateCase::HypEmpty;
  auto r = corpus_report({a, b, c});
  EXPECT_EQ(r.sentences, 3u);
  EXPECT_NEAR(r.mean_f, 0.5, 1e-15);
  EXPECT_NEAR(r.mean_precision, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.total_tp, 2.0);
  EXPECT_EQ(r.total_fn, 1.5);
  EXPECT_EQ(r.both_empty, 1u);
  EXPECT_EQ(r.hyp_empty, 1u);
  EXPECT_EQ(r.ref_empty, 0u);
  EXPECT_EQ(r.non_converged, 1u);
  EXPECT_EQ(r.fp_clamped, 1u);
  EXPECT_EQ(r.fn_clamped, 0u);
}
