#include "uoterrant/scoring.hpp"

#include <numeric>

#include "uoterrant/edit_extract.hpp"
#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

double sum(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

// Picks the best candidate by F; earlier candidates win ties.
template <typename ScoreOne>
SentenceScore best_over_refs(const SentenceInput& input, ScoreOne score_one) {
  if (input.refs.empty()) throw Error("at least one reference is required");
  SentenceScore best;
  for (std::size_t r = 0; r < input.refs.size(); ++r) {
    SentenceScore s = score_one(input.refs[r]);
    s.chosen_ref = r;
    if (r == 0 || s.f_beta > best.f_beta) best = std::move(s);
  }
  return best;
}

void fill_prf(SentenceScore& s, double beta) {
  auto p = prf(s.tp, s.fp, s.fn, beta);
  s.precision = p.precision;
  s.recall = p.recall;
  s.f_beta = p.f;
}

}  // namespace

const char* to_string(DegenerateCase c) {
  switch (c) {
    case DegenerateCase::BothEmpty: return "BothEmpty";
    case DegenerateCase::HypEmpty: return "HypEmpty";
    case DegenerateCase::RefEmpty: return "RefEmpty";
  }
  return "?";
}

Decomposition decompose(const TransportPlan& plan, const std::vector<double>& a, const std::vector<double>& b) {
  if (plan.T.rows() != a.size() || plan.T.cols() != b.size()) {
    throw ShapeMismatch("plan is " + std::to_string(plan.T.rows()) + "x" + std::to_string(plan.T.cols()) +
                        " for masses of size " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  Decomposition d;
  d.tp = plan.total();
  d.fp_raw = sum(a) - d.tp;
  d.fn_raw = sum(b) - d.tp;
  d.fp_clamped = d.fp_raw < 0.0;
  d.fn_clamped = d.fn_raw < 0.0;
  d.fp = std::max(d.fp_raw, 0.0);
  d.fn = std::max(d.fn_raw, 0.0);
  return d;
}

Prf prf(double tp, double fp, double fn, double beta) {
  Prf out;
  out.precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
  out.recall = tp + fn > 0.0 ? tp / (tp + fn) : 1.0;
  const double b2 = beta * beta;
  const double denom = b2 * out.precision + out.recall;
  out.f = out.precision == 0.0 && out.recall == 0.0 ? 0.0 : (1.0 + b2) * out.precision * out.recall / denom;
  return out;
}

SentenceInput make_input(const std::string& src, const std::string& hyp, const std::vector<std::string>& refs) {
  SentenceInput in;
  in.source = tokenize(src);
  in.hyp = extract_edits(in.source, tokenize(hyp));
  for (const auto& r : refs) in.refs.push_back(extract_edits(in.source, tokenize(r)));
  return in;
}

SentenceScore sentence_score_uot(const SentenceInput& input, const ScoringConfig& cfg) {
  if (!cfg.provider) throw Error("scoring needs an embedding provider");
  input.hyp.check_against(input.source.size());
  std::optional<EditVectorSet> hyp_vectors;
  auto hyp = [&]() -> const EditVectorSet& {
    if (!hyp_vectors) hyp_vectors = vectorize(input.source, input.hyp, *cfg.provider, cfg.vectorize, cfg.mass);
    return *hyp_vectors;
  };

  return best_over_refs(input, [&](const EditSet& ref_edits) {
    ref_edits.check_against(input.source.size());
    SentenceScore s;
    s.hyp_edits = input.hyp;
    s.ref_edits = ref_edits;
    if (input.hyp.empty() && ref_edits.empty()) {
      s.degenerate_case = DegenerateCase::BothEmpty;
      fill_prf(s, cfg.beta);
      return s;
    }
    if (input.hyp.empty()) {
      auto ref = vectorize(input.source, ref_edits, *cfg.provider, cfg.vectorize, cfg.mass);
      s.degenerate_case = DegenerateCase::HypEmpty;
      s.fn = s.fn_raw = sum(ref.masses);
      s.ref_masses = std::move(ref.masses);
      fill_prf(s, cfg.beta);
      return s;
    }
    if (ref_edits.empty()) {
      s.degenerate_case = DegenerateCase::RefEmpty;
      s.fp = s.fp_raw = sum(hyp().masses);
      s.hyp_masses = hyp().masses;
      fill_prf(s, cfg.beta);
      return s;
    }
    auto ref = vectorize(input.source, ref_edits, *cfg.provider, cfg.vectorize, cfg.mass);
    auto cost = cost_matrix(hyp().vectors, ref.vectors, cfg.cost);
    auto plan = solve_uot(hyp().masses, ref.masses, cost, cfg.uot);
    auto d = decompose(plan, hyp().masses, ref.masses);
    s.tp = d.tp;
    s.fp = d.fp;
    s.fn = d.fn;
    s.fp_raw = d.fp_raw;
    s.fn_raw = d.fn_raw;
    s.fp_clamped = d.fp_clamped;
    s.fn_clamped = d.fn_clamped;
    s.converged = plan.converged;
    s.hyp_masses = hyp().masses;
    s.ref_masses = ref.masses;
    if (cfg.keep_plan) s.plan = std::move(plan);
    fill_prf(s, cfg.beta);
    return s;
  });
}

SentenceScore sentence_score_errant(const SentenceInput& input, double beta) {
  return best_over_refs(input, [&](const EditSet& ref_edits) {
    SentenceScore s;
    s.hyp_edits = input.hyp;
    s.ref_edits = ref_edits;
    std::size_t matched = 0;
    for (const auto& e : input.hyp) matched += ref_edits.find(e).has_value() ? 1 : 0;
    s.tp = static_cast<double>(matched);
    s.fp = s.fp_raw = static_cast<double>(input.hyp.size() - matched);
    s.fn = s.fn_raw = static_cast<double>(ref_edits.size() - matched);
    if (input.hyp.empty() && ref_edits.empty()) {
      s.degenerate_case = DegenerateCase::BothEmpty;
    } else if (input.hyp.empty()) {
      s.degenerate_case = DegenerateCase::HypEmpty;
    } else if (ref_edits.empty()) {
      s.degenerate_case = DegenerateCase::RefEmpty;
    }
    fill_prf(s, beta);
    return s;
  });
}

CorpusSummary corpus_report(const std::vector<SentenceScore>& scores) {
  CorpusSummary out;
  out.sentences = scores.size();
  for (const auto& s : scores) {
    out.mean_precision += s.precision;
    out.mean_recall += s.recall;
    out.mean_f += s.f_beta;
    out.total_tp += s.tp;
    out.total_fp += s.fp;
    out.total_fn += s.fn;
    if (s.degenerate_case == DegenerateCase::BothEmpty) ++out.both_empty;
    if (s.degenerate_case == DegenerateCase::HypEmpty) ++out.hyp_empty;
    if (s.degenerate_case == DegenerateCase::RefEmpty) ++out.ref_empty;
    if (!s.converged) ++out.non_converged;
    if (s.fp_clamped) ++out.fp_clamped;
    if (s.fn_clamped) ++out.fn_clamped;
  }
  if (!scores.empty()) {
    const double n = static_cast<double>(scores.size());
    out.mean_precision /= n;
    out.mean_recall /= n;
    out.mean_f /= n;
  }
  return out;
}

}  // namespace uoterrant
