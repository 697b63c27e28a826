#include "uoterrant/metaeval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "uoterrant/editvec.hpp"
#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Truncated-Gaussian correction factors for a win (t > margin).
double v_win(double t, double margin) {
  const double x = t - margin;
  const double denom = cdf(x);
  return denom > 1e-300 ? pdf(x) / denom : -x;
}

double w_win(double t, double margin) {
  const double x = t - margin;
  const double v = v_win(t, margin);
  return std::clamp(v * (v + x), 1e-12, 1.0 - 1e-12);
}

// ... and for a draw (|t| <= margin).
double v_draw(double t, double margin) {
  const double abs_t = std::abs(t);
  const double a = margin - abs_t, b = -margin - abs_t;
  const double denom = cdf(a) - cdf(b);
  const double v = denom > 1e-300 ? (pdf(b) - pdf(a)) / denom : a;
  return t < 0.0 ? -v : v;
}

double w_draw(double t, double margin) {
  const double abs_t = std::abs(t);
  const double a = margin - abs_t, b = -margin - abs_t;
  const double denom = cdf(a) - cdf(b);
  if (!(denom > 1e-300)) return 1.0 - 1e-12;
  const double v = v_draw(abs_t, margin);
  return std::clamp(v * v + (a * pdf(a) - b * pdf(b)) / denom, 1e-12, 1.0 - 1e-12);
}

struct Gaussian {
  double mu;
  double var;
};

// Unbiased index in [0, n) from a 64-bit engine.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

Outcome flip(Outcome o) {
  switch (o) {
    case Outcome::AWins: return Outcome::BWins;
    case Outcome::BWins: return Outcome::AWins;
    case Outcome::Tie: return Outcome::Tie;
  }
  return o;
}

using PairKey = std::tuple<std::size_t, std::string, std::string>;

// Orients a comparison so that system_a < system_b.
std::pair<PairKey, Outcome> canonical(const Comparison& c) {
  if (c.system_a < c.system_b) return {{c.sentence_id, c.system_a, c.system_b}, c.outcome};
  return {{c.sentence_id, c.system_b, c.system_a}, flip(c.outcome)};
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::AWins: return "AWins";
    case Outcome::BWins: return "BWins";
    case Outcome::Tie: return "Tie";
  }
  return "?";
}

std::vector<Comparison> pairwise_outcomes(const std::vector<SystemScores>& systems, double tie_epsilon) {
  std::vector<Comparison> out;
  if (systems.empty()) return out;
  const auto& ids = systems.front().by_sentence;
  for (const auto& s : systems) {
    bool same = s.by_sentence.size() == ids.size() &&
                std::equal(s.by_sentence.begin(), s.by_sentence.end(), ids.begin(),
                           [](const auto& x, const auto& y) { return x.first == y.first; });
    if (!same) {
      throw CoverageError("system '" + s.system + "' does not cover the same sentences as '" + systems.front().system + "'");
    }
  }
  for (const auto& [sid, unused] : ids) {
    (void)unused;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      for (std::size_t j = i + 1; j < systems.size(); ++j) {
        if (systems[i].system == systems[j].system) throw Error("duplicate system '" + systems[i].system + "'");
        const double fa = systems[i].by_sentence.at(sid);
        const double fb = systems[j].by_sentence.at(sid);
        Outcome o = fa > fb + tie_epsilon ? Outcome::AWins : fb > fa + tie_epsilon ? Outcome::BWins : Outcome::Tie;
        out.push_back({sid, systems[i].system, systems[j].system, o});
      }
    }
  }
  return out;
}

void TrueSkillParams::validate() const {
  if (!(sigma0 > 0.0) || !(beta > 0.0) || !(tau > 0.0)) throw Error("TrueSkill sigma0, beta and tau must be positive");
  if (!(draw_probability > 0.0 && draw_probability < 1.0)) throw Error("draw_probability must lie in (0, 1)");
}

double TrueSkillParams::draw_margin() const {
  // 2 * Phi(margin / (sqrt(2) * beta)) - 1 == draw_probability
  boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, (draw_probability + 1.0) / 2.0) * std::numbers::sqrt2 * beta;
}

std::vector<SystemRating> trueskill_rank(const std::vector<Comparison>& comparisons, const TrueSkillParams& params) {
  params.validate();
  std::vector<Comparison> order = comparisons;
  std::stable_sort(order.begin(), order.end(), [](const Comparison& x, const Comparison& y) {
    return std::tie(x.sentence_id, x.system_a, x.system_b) < std::tie(y.sentence_id, y.system_a, y.system_b);
  });
  std::mt19937_64 rng(params.shuffle_seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  std::map<std::string, Gaussian> ratings;
  for (const auto& c : comparisons) {
    if (c.system_a == c.system_b) throw Error("comparison of '" + c.system_a + "' with itself");
    ratings.try_emplace(c.system_a, Gaussian{params.mu0, params.sigma0 * params.sigma0});
    ratings.try_emplace(c.system_b, Gaussian{params.mu0, params.sigma0 * params.sigma0});
  }

  const double margin = params.draw_margin();
  const double tau2 = params.tau * params.tau;
  const double beta2 = params.beta * params.beta;
  for (const auto& c : order) {
    // Orient so that `first` is the winner, or system_a on a draw.
    const bool a_first = c.outcome != Outcome::BWins;
    Gaussian& first = ratings.at(a_first ? c.system_a : c.system_b);
    Gaussian& second = ratings.at(a_first ? c.system_b : c.system_a);
    first.var += tau2;
    second.var += tau2;
    const double c2 = 2.0 * beta2 + first.var + second.var;
    const double cc = std::sqrt(c2);
    const double t = (first.mu - second.mu) / cc;
    const double m = margin / cc;
    const bool draw = c.outcome == Outcome::Tie;
    const double v = draw ? v_draw(t, m) : v_win(t, m);
    const double w = draw ? w_draw(t, m) : w_win(t, m);
    first.mu += first.var / cc * v;
    second.mu -= second.var / cc * v;
    first.var *= 1.0 - first.var / c2 * w;
    second.var *= 1.0 - second.var / c2 * w;
  }

  std::vector<SystemRating> out;
  for (const auto& [name, g] : ratings) out.push_back({name, g.mu, std::sqrt(g.var)});
  std::stable_sort(out.begin(), out.end(), [](const SystemRating& x, const SystemRating& y) { return x.mu > y.mu; });
  return out;
}

std::vector<SystemWinRate> expected_wins(const std::vector<Comparison>& comparisons) {
  std::map<std::string, std::pair<double, std::size_t>> tally;
  for (const auto& c : comparisons) {
    auto& a = tally[c.system_a];
    auto& b = tally[c.system_b];
    ++a.second;
    ++b.second;
    switch (c.outcome) {
      case Outcome::AWins: a.first += 1.0; break;
      case Outcome::BWins: b.first += 1.0; break;
      case Outcome::Tie:
        a.first += 0.5;
        b.first += 0.5;
        break;
    }
  }
  std::vector<SystemWinRate> out;
  for (const auto& [name, t] : tally) out.push_back({name, t.first / static_cast<double>(t.second)});
  std::stable_sort(out.begin(), out.end(), [](const SystemWinRate& x, const SystemWinRate& y) { return x.score > y.score; });
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateInput("correlation inputs differ in length");
  if (x.size() < 2) throw DegenerateInput("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DegenerateInput("correlation input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  std::size_t k = 0;
  while (k < idx.size()) {
    std::size_t end = k;
    while (end + 1 < idx.size() && x[idx[end + 1]] == x[idx[k]]) ++end;
    const double avg = 0.5 * static_cast<double>(k + end) + 1.0;
    for (std::size_t t = k; t <= end; ++t) ranks[idx[t]] = avg;
    k = end + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateInput("correlation inputs differ in length");
  return pearson(average_ranks(x), average_ranks(y));
}

double AgreementMatrix::rate(const std::string& x, const std::string& y) const {
  for (const auto& p : pairs) {
    if ((p.system_a == x && p.system_b == y) || (p.system_a == y && p.system_b == x)) return p.rate();
  }
  throw NotFound("no agreement entry for " + x + " vs " + y);
}

AgreementMatrix agreement_matrix(const std::vector<Comparison>& metric, const std::vector<Comparison>& human) {
  std::map<PairKey, Outcome> human_by_key;
  for (const auto& c : human) {
    auto [key, o] = canonical(c);
    if (!human_by_key.emplace(key, o).second) throw CoverageError("duplicate human comparison");
  }
  if (human_by_key.size() != metric.size()) {
    throw CoverageError("metric has " + std::to_string(metric.size()) + " comparisons but human judgments have " +
                        std::to_string(human_by_key.size()));
  }

  AgreementMatrix out;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  auto note_system = [&](const std::string& s) {
    if (std::find(out.systems.begin(), out.systems.end(), s) == out.systems.end()) out.systems.push_back(s);
  };
  for (const auto& c : metric) {
    auto [key, o] = canonical(c);
    auto it = human_by_key.find(key);
    if (it == human_by_key.end()) {
      throw CoverageError("no human judgment for sentence " + std::to_string(c.sentence_id) + ", " + c.system_a +
                          " vs " + c.system_b);
    }
    note_system(c.system_a);
    note_system(c.system_b);
    auto pair_id = std::make_pair(std::get<1>(key), std::get<2>(key));
    auto [pos, inserted] = slot.try_emplace(pair_id, out.pairs.size());
    if (inserted) out.pairs.push_back({c.system_a, c.system_b, 0, 0});
    auto& p = out.pairs[pos->second];
    ++p.sentences;
    if (it->second == o) ++p.agreed;
  }
  return out;
}

std::vector<NormStats> norm_stats_by_type(const std::vector<TypedVector>& vectors) {
  std::map<std::string, std::vector<double>> norms;
  for (const auto& tv : vectors) norms[tv.type].push_back(l2_norm(tv.vector));
  std::vector<NormStats> out;
  for (const auto& [type, xs] : norms) {
    NormStats s;
    s.type = type;
    s.count = xs.size();
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stdev = std::sqrt(var / static_cast<double>(xs.size()));
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const NormStats& x, const NormStats& y) { return x.mean < y.mean; });
  return out;
}

}  // namespace uoterrant
