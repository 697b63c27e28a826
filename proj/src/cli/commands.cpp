#include "uoterrant/cli/commands.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "uoterrant/edit_extract.hpp"
#include "uoterrant/m2.hpp"

namespace uoterrant::cli {

namespace {

std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

void require_same_count(std::size_t expected, std::size_t got, const Path& a, const Path& b) {
  if (expected != got) {
    throw InputError(a.string() + " has " + std::to_string(expected) + " lines but " + b.string() + " has " +
                     std::to_string(got));
  }
}

std::vector<M2Sentence> read_m2(const Path& path) {
  try {
    return parse_m2(path);
  } catch (const ParseError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

nlohmann::json load_json(const Path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// Every sentence the pipeline will ask the provider for.
std::vector<std::string> required_sentences(const std::vector<SentenceInput>& corpus, VectorizeMode mode) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto add = [&](std::vector<std::string> xs) {
    for (auto& x : xs)
      if (seen.insert(x).second) out.push_back(std::move(x));
  };
  for (const auto& s : corpus) {
    add(intermediate_sentences(s.source, s.hyp, mode));
    for (const auto& r : s.refs) add(intermediate_sentences(s.source, r, mode));
  }
  return out;
}

int report_failure(const std::exception& e, std::ostream& err) {
  if (dynamic_cast<const MissingEmbedding*>(&e) || dynamic_cast<const ServiceError*>(&e)) {
    err << "error: embedder failure: " << e.what() << '\n';
    return kExitDependency;
  }
  err << "error: " << e.what() << '\n';
  return kExitInput;
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return report_failure(e, err);
  }
}

nlohmann::json score_json(const SentenceScore& s) {
  nlohmann::json j = {
      {"tp", s.tp},
      {"fp", s.fp},
      {"fn", s.fn},
      {"precision", s.precision},
      {"recall", s.recall},
      {"f", s.f_beta},
      {"chosen_ref", s.chosen_ref},
      {"degenerate_case", s.degenerate_case ? nlohmann::json(to_string(*s.degenerate_case)) : nlohmann::json(nullptr)},
      {"converged", s.converged},
      {"hyp_edits", s.hyp_edits.size()},
      {"ref_edits", s.ref_edits.size()},
  };
  if (s.fp_clamped || s.fn_clamped) {
    j["fp_raw"] = s.fp_raw;
    j["fn_raw"] = s.fn_raw;
  }
  return j;
}

nlohmann::json summary_json(const CorpusSummary& c) {
  return {
      {"sentences", c.sentences},
      {"mean_precision", c.mean_precision},
      {"mean_recall", c.mean_recall},
      {"mean_f", c.mean_f},
      {"total_tp", c.total_tp},
      {"total_fp", c.total_fp},
      {"total_fn", c.total_fn},
      {"degenerate", {{"BothEmpty", c.both_empty}, {"HypEmpty", c.hyp_empty}, {"RefEmpty", c.ref_empty}}},
      {"non_converged", c.non_converged},
      {"clamped", {{"fp", c.fp_clamped}, {"fn", c.fn_clamped}}},
  };
}

std::vector<std::string> default_names(const std::vector<Path>& files, std::vector<std::string> names) {
  if (names.empty()) {
    for (const auto& f : files) names.push_back(f.stem().string());
  }
  if (names.size() != files.size()) {
    throw InputError(std::to_string(files.size()) + " score files but " + std::to_string(names.size()) + " names");
  }
  return names;
}

}  // namespace

std::vector<std::string> read_lines(const Path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<SentenceInput> load_corpus(const CorpusOptions& opts, bool require_refs) {
  std::optional<std::vector<M2Sentence>> hyp_m2, ref_m2;
  if (opts.hyp_m2) hyp_m2 = read_m2(*opts.hyp_m2);
  if (opts.ref_m2) ref_m2 = read_m2(*opts.ref_m2);

  std::vector<TokenSeq> sources;
  std::optional<Path> source_origin;
  if (opts.src) {
    for (const auto& l : read_lines(*opts.src)) sources.push_back(tokenize(l));
    source_origin = opts.src;
  } else if (ref_m2) {
    for (const auto& s : *ref_m2) sources.push_back(s.source);
    source_origin = opts.ref_m2;
  } else if (hyp_m2) {
    for (const auto& s : *hyp_m2) sources.push_back(s.source);
    source_origin = opts.hyp_m2;
  } else {
    throw InputError("no source sentences: pass --src or an M2 file");
  }

  auto check_m2 = [&](const std::vector<M2Sentence>& m2, const Path& path) {
    require_same_count(sources.size(), m2.size(), *source_origin, path);
    for (std::size_t i = 0; i < m2.size(); ++i) {
      if (m2[i].source != sources[i]) {
        throw InputError(path.string() + ": source of sentence " + std::to_string(i) + " differs from " +
                         source_origin->string());
      }
    }
  };

  std::vector<SentenceInput> corpus(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) corpus[i].source = sources[i];

  try {
    if (hyp_m2) {
      check_m2(*hyp_m2, *opts.hyp_m2);
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& ann = (*hyp_m2)[i].annotations;
        corpus[i].hyp = ann.empty() ? EditSet{} : ann.front().edits;
        corpus[i].hyp.check_against(corpus[i].source.size());
      }
    } else if (opts.hyp) {
      auto lines = read_lines(*opts.hyp);
      require_same_count(sources.size(), lines.size(), *source_origin, *opts.hyp);
      for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].hyp = extract_edits(corpus[i].source, tokenize(lines[i]));
    } else {
      throw InputError("no hypotheses: pass --hyp or --hyp-m2");
    }

    if (ref_m2) {
      check_m2(*ref_m2, *opts.ref_m2);
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& a : (*ref_m2)[i].annotations) {
          a.edits.check_against(corpus[i].source.size());
          corpus[i].refs.push_back(a.edits);
        }
        if (corpus[i].refs.empty()) corpus[i].refs.emplace_back();
      }
    }
    for (const auto& ref_path : opts.refs) {
      auto lines = read_lines(ref_path);
      require_same_count(sources.size(), lines.size(), *source_origin, ref_path);
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        corpus[i].refs.push_back(extract_edits(corpus[i].source, tokenize(lines[i])));
      }
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  if (require_refs && !corpus.empty() && corpus.front().refs.empty()) throw InputError("no references: pass --refs or --ref-m2");
  return corpus;
}

int cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto src = read_lines(opts.src);
    auto cor = read_lines(opts.cor);
    require_same_count(src.size(), cor.size(), opts.src, opts.cor);
    std::vector<M2Sentence> m2;
    for (std::size_t i = 0; i < src.size(); ++i) {
      M2Sentence s;
      s.source = tokenize(src[i]);
      s.annotations.push_back({0, extract_edits(s.source, tokenize(cor[i]))});
      m2.push_back(std::move(s));
    }
    if (opts.m2_out) {
      write_m2(*opts.m2_out, m2);
    } else {
      write_m2(out, m2);
    }
    return kExitOk;
  });
}

std::vector<std::string> enumerate_sentences(const std::vector<SentenceInput>& corpus, EnumerateMode mode,
                                             bool include_originals) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& x) {
    if (seen.insert(x).second) out.push_back(x);
  };
  for (const auto& s : corpus) {
    if (include_originals) {
      add(detokenize(s.source));
      add(detokenize(apply_edits(s.source, s.hyp)));
      for (const auto& r : s.refs) add(detokenize(apply_edits(s.source, r)));
    }
    std::vector<VectorizeMode> modes;
    if (mode != EnumerateMode::Add) modes.push_back(VectorizeMode::Remove);
    if (mode != EnumerateMode::Remove) modes.push_back(VectorizeMode::Add);
    for (auto m : modes) {
      for (const auto& x : intermediate_sentences(s.source, s.hyp, m)) add(x);
      for (const auto& r : s.refs)
        for (const auto& x : intermediate_sentences(s.source, r, m)) add(x);
    }
  }
  return out;
}

int cmd_enumerate(const EnumerateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto corpus = load_corpus(opts.corpus);
    for (const auto& s : enumerate_sentences(corpus, opts.mode)) out << s << '\n';
    return kExitOk;
  });
}

std::vector<SentenceScore> score_corpus(const std::vector<SentenceInput>& corpus, const ScoringConfig& cfg,
                                        std::size_t workers) {
  std::vector<SentenceScore> scores(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        scores[i] = sentence_score_uot(corpus[i], cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, corpus.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  // Report the first failing sentence regardless of completion order.
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const MissingEmbedding&) {
      throw;
    } catch (const ServiceError& e) {
      throw ServiceError("sentence " + std::to_string(i) + ": " + e.what());
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      throw Error("sentence " + std::to_string(i) + ": " + e.what());
    }
  }
  return scores;
}

nlohmann::json score_report(const std::vector<SentenceScore>& scores, const std::vector<SentenceScore>* errant,
                            const RunConfig& cfg, const std::vector<std::string>& warnings) {
  nlohmann::json sentences = nlohmann::json::array();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto j = score_json(scores[i]);
    j["id"] = i;
    if (errant) j["errant"] = score_json((*errant)[i]);
    sentences.push_back(std::move(j));
  }
  nlohmann::json report = {
      {"format", kReportFormat},
      {"config", to_json(cfg)},
      {"sentences", std::move(sentences)},
      {"summary", summary_json(corpus_report(scores))},
      {"warnings", warnings},
  };
  if (errant) report["errant_summary"] = summary_json(corpus_report(*errant));
  return report;
}

void write_plans_tsv(std::ostream& out, const std::vector<SentenceScore>& scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    out << "# sentence " << i << "\tref " << s.chosen_ref << "\ttp " << fmt(s.tp) << "\tfp " << fmt(s.fp) << "\tfn "
        << fmt(s.fn);
    if (s.degenerate_case) out << '\t' << to_string(*s.degenerate_case);
    out << '\n';
    if (s.plan) {
      out << "hyp\\ref";
      for (const auto& e : s.ref_edits) out << '\t' << describe(e);
      out << '\n';
      for (std::size_t r = 0; r < s.hyp_edits.size(); ++r) {
        out << describe(s.hyp_edits[r]);
        for (std::size_t c = 0; c < s.ref_edits.size(); ++c) out << '\t' << fmt(s.plan->T(r, c));
        out << '\n';
      }
    }
    out << '\n';
  }
}

int cmd_score(const ScoreOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto corpus = load_corpus(opts.corpus);
    std::vector<std::string> warnings;

    ScoringConfig scfg;
    scfg.vectorize = opts.config.vectorize;
    scfg.mass = opts.config.mass;
    scfg.cost = opts.config.cost;
    scfg.uot = opts.config.uot;
    scfg.beta = opts.config.beta;
    scfg.keep_plan = opts.plans_out.has_value();
    try {
      if (opts.config.embedder.starts_with("store:")) {
        auto loaded = load_store(Path(opts.config.embedder.substr(6)));
        for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
        scfg.provider = std::make_shared<EmbeddingStore>(std::move(loaded.store));
      } else {
        scfg.provider = make_provider(opts.config.embedder);
      }
    } catch (const Error& e) {
      err << "error: cannot initialize embedder: " << e.what() << '\n';
      return kExitDependency;
    }

    auto needed = required_sentences(corpus, opts.config.vectorize);
    if (auto store = std::dynamic_pointer_cast<const EmbeddingStore>(scfg.provider)) {
      std::vector<std::string> missing;
      for (const auto& s : needed)
        if (!store->contains(s)) missing.push_back(s);
      if (!missing.empty()) {
        err << "error: embedding store lacks " << missing.size() << " sentence(s):\n";
        for (const auto& s : missing) err << "  " << s << '\n';
        return kExitDependency;
      }
    }
    scfg.provider->prefetch(needed);

    auto scores = score_corpus(corpus, scfg, opts.workers);
    auto summary = corpus_report(scores);
    if (summary.non_converged) {
      warnings.push_back(std::to_string(summary.non_converged) + " sentence(s) hit max_iters before converging");
    }
    for (const auto& w : warnings) err << "warning: " << w << '\n';

    std::optional<std::vector<SentenceScore>> errant;
    if (opts.errant_baseline) {
      errant.emplace();
      for (const auto& s : corpus) errant->push_back(sentence_score_errant(s, opts.config.beta));
    }
    if (opts.plans_out) {
      std::ofstream plans(*opts.plans_out);
      if (!plans) throw InputError("cannot write " + opts.plans_out->string());
      write_plans_tsv(plans, scores);
    }
    out << score_report(scores, errant ? &*errant : nullptr, opts.config, warnings).dump(2) << '\n';
    return kExitOk;
  });
}

SystemScores read_report_scores(const Path& path, const std::string& system) {
  auto report = load_json(path);
  if (!report.is_object() || report.value("format", "") != kReportFormat || !report.contains("sentences")) {
    throw InputError(path.string() + " is not a " + std::string(kReportFormat) + " report");
  }
  SystemScores out;
  out.system = system;
  for (const auto& s : report["sentences"]) {
    out.by_sentence[s.at("id").get<std::size_t>()] = s.at("f").get<double>();
  }
  return out;
}

int cmd_rank(const RankOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.scores.empty()) throw InputError("rank needs at least one score file");
    auto names = default_names(opts.scores, opts.names);
    std::vector<SystemScores> systems;
    for (std::size_t i = 0; i < opts.scores.size(); ++i) systems.push_back(read_report_scores(opts.scores[i], names[i]));

    RunConfig cfg = config_from_json(load_json(opts.scores.front()).at("config"));
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.tie_epsilon) cfg.tie_epsilon = *opts.tie_epsilon;

    std::vector<Comparison> comparisons;
    try {
      comparisons = pairwise_outcomes(systems, cfg.tie_epsilon);
    } catch (const CoverageError& e) {
      throw InputError(e.what());
    }
    if (comparisons.empty()) throw InputError("no comparisons: need at least two systems and one sentence");

    nlohmann::json ranking = nlohmann::json::array();
    std::string method;
    if (opts.method == RankMethod::TrueSkill) {
      method = "trueskill";
      for (const auto& r : trueskill_rank(comparisons, cfg.effective_trueskill())) {
        ranking.push_back({{"system", r.system}, {"mu", r.mu}, {"sigma", r.sigma}, {"conservative", r.conservative()},
                           {"score", r.mu}});
      }
    } else {
      method = "expected-wins";
      for (const auto& r : expected_wins(comparisons)) ranking.push_back({{"system", r.system}, {"score", r.score}});
    }
    nlohmann::json doc = {
        {"format", kRankingFormat},
        {"method", method},
        {"comparisons", comparisons.size()},
        {"config", to_json(cfg)},
        {"systems", std::move(ranking)},
    };
    out << doc.dump(2) << '\n';
    return kExitOk;
  });
}

HumanScores read_human_tsv(const Path& path) {
  HumanScores out;
  std::map<std::string, std::size_t> index;
  std::size_t line_no = 0;
  std::optional<std::size_t> columns;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 2 or 3 tab-separated fields");
    }
    auto score = parse_double(fields.back());
    if (!score) {
      if (!columns) continue;  // header row
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + fields.back() + "'");
    }
    if (columns && *columns != fields.size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    columns = fields.size();
    if (fields.size() == 2) {
      out.per_system.emplace_back(fields[0], *score);
      continue;
    }
    std::size_t sid = 0;
    auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), sid);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad sentence id '" + fields[1] + "'");
    }
    auto [it, inserted] = index.try_emplace(fields[0], out.per_sentence.size());
    if (inserted) out.per_sentence.push_back({fields[0], {}});
    out.per_sentence[it->second].by_sentence[sid] = *score;
  }
  if (out.per_sentence.empty() && out.per_system.empty()) throw InputError(path.string() + " holds no scores");
  return out;
}

int cmd_correlate(const CorrelateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto ranking = load_json(opts.ranking);
    if (!ranking.is_object() || ranking.value("format", "") != kRankingFormat) {
      throw InputError(opts.ranking.string() + " is not a " + std::string(kRankingFormat) + " document");
    }
    auto human = read_human_tsv(opts.human);
    std::map<std::string, double> human_score;
    for (const auto& [sys, score] : human.per_system) human_score[sys] = score;
    for (const auto& s : human.per_sentence) {
      double total = 0.0;
      for (const auto& [sid, v] : s.by_sentence) total += v;
      human_score[s.system] = total / static_cast<double>(s.by_sentence.size());
    }
    std::vector<double> metric_vals, human_vals;
    for (const auto& r : ranking.at("systems")) {
      const auto name = r.at("system").get<std::string>();
      auto it = human_score.find(name);
      if (it == human_score.end()) throw InputError("no human score for system '" + name + "'");
      metric_vals.push_back(r.at("score").get<double>());
      human_vals.push_back(it->second);
    }
    try {
      nlohmann::json doc = {{"systems", metric_vals.size()},
                            {"pearson", pearson(metric_vals, human_vals)},
                            {"spearman", spearman(metric_vals, human_vals)}};
      out << doc.dump(2) << '\n';
    } catch (const DegenerateInput& e) {
      throw InputError(e.what());
    }
    return kExitOk;
  });
}

void write_agreement_tsv(std::ostream& out, const AgreementMatrix& m) {
  for (const auto& s : m.systems) out << '\t' << s;
  out << '\n';
  for (const auto& row : m.systems) {
    out << row;
    for (const auto& col : m.systems) {
      out << '\t';
      if (row == col) continue;
      try {
        out << fmt(m.rate(row, col));
      } catch (const NotFound&) {
      }
    }
    out << '\n';
  }
}

int cmd_agreement(const AgreementOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto names = default_names(opts.metric_scores, opts.names);
    std::vector<SystemScores> metric;
    for (std::size_t i = 0; i < names.size(); ++i) metric.push_back(read_report_scores(opts.metric_scores[i], names[i]));
    auto human = read_human_tsv(opts.human);
    if (human.per_sentence.empty()) throw InputError("agreement needs sentence-level human scores");
    // Human systems in the metric's order so pairs line up.
    std::vector<SystemScores> human_systems;
    for (const auto& n : names) {
      auto it = std::find_if(human.per_sentence.begin(), human.per_sentence.end(),
                             [&](const SystemScores& s) { return s.system == n; });
      if (it == human.per_sentence.end()) throw InputError("no human scores for system '" + n + "'");
      human_systems.push_back(*it);
    }
    try {
      auto m = agreement_matrix(pairwise_outcomes(metric, opts.tie_epsilon),
                                pairwise_outcomes(human_systems, opts.tie_epsilon));
      write_agreement_tsv(out, m);
    } catch (const CoverageError& e) {
      throw InputError(e.what());
    }
    return kExitOk;
  });
}

int cmd_norms(const NormsOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto corpus = load_corpus(opts.corpus, false);
    auto provider = make_provider(opts.config.embedder);
    std::vector<TypedVector> typed;
    for (const auto& s : corpus) {
      auto vectors = edit_vectors(s.source, s.hyp, *provider, opts.config.vectorize);
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        const auto& e = s.hyp[i];
        typed.push_back({e.type_label ? *e.type_label : classify_coarse(e, s.source), std::move(vectors[i])});
      }
    }
    out << "type\tmean\tstdev\tcount\n";
    for (const auto& row : norm_stats_by_type(typed)) {
      out << row.type << '\t' << fmt(row.mean) << '\t' << fmt(row.stdev) << '\t' << row.count << '\n';
    }
    return kExitOk;
  });
}

}  // namespace uoterrant::cli
