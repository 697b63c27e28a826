// Command-line front end: edit extraction, sentence scoring and
// meta-evaluation over line-aligned corpora.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "uoterrant/cli/commands.hpp"

namespace cli = uoterrant::cli;

namespace {

std::vector<cli::Path> split_paths(const std::string& csv) {
  std::vector<cli::Path> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  for (const auto& p : split_paths(csv)) out.push_back(p.string());
  return out;
}

struct CorpusFlags {
  std::string src, hyp, refs, hyp_m2, ref_m2;

  void attach(CLI::App* app) {
    app->add_option("--src", src, "Source sentences, one tokenized sentence per line");
    app->add_option("--hyp", hyp, "Hypothesis sentences, line-aligned with --src");
    app->add_option("--refs", refs, "Comma-separated reference files, line-aligned with --src");
    app->add_option("--hyp-m2", hyp_m2, "Pre-extracted hypothesis edits (M2, first annotator)");
    app->add_option("--ref-m2", ref_m2, "Pre-extracted reference edits (M2, one reference per annotator)");
  }

  cli::CorpusOptions options() const {
    cli::CorpusOptions o;
    if (!src.empty()) o.src = src;
    if (!hyp.empty()) o.hyp = hyp;
    o.refs = split_paths(refs);
    if (!hyp_m2.empty()) o.hyp_m2 = hyp_m2;
    if (!ref_m2.empty()) o.ref_m2 = ref_m2;
    return o;
  }
};

// Config file first, then explicit flags on top.
struct ConfigFlags {
  std::string config_path;
  std::string embedder, vectorization, mass, cost;
  std::optional<double> epsilon, lambda1, lambda2, beta;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--embedder", embedder, "test | test:<dim> | store:<path> | remote:<url>");
    app->add_option("--vectorization", vectorization, "remove | add");
    app->add_option("--mass", mass, "l2 | uniform");
    app->add_option("--cost", cost, "euclidean | cosine");
    app->add_option("--epsilon", epsilon, "Entropic regularization weight");
    app->add_option("--lambda1", lambda1, "KL weight on the hypothesis marginal");
    app->add_option("--lambda2", lambda2, "KL weight on the reference marginal");
    app->add_option("--beta", beta, "F-measure beta");
    app->add_option("--seed", seed, "Seed for every randomized step");
  }

  cli::RunConfig resolve() const {
    cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (!embedder.empty()) cfg.embedder = embedder;
    if (!vectorization.empty()) cfg.vectorize = cli::parse_vectorize_mode(vectorization);
    if (!mass.empty()) cfg.mass = cli::parse_mass_mode(mass);
    if (!cost.empty()) cfg.cost = cli::parse_cost_mode(cost);
    if (epsilon) cfg.uot.epsilon = *epsilon;
    if (lambda1) cfg.uot.lambda1 = *lambda1;
    if (lambda2) cfg.uot.lambda2 = *lambda2;
    if (beta) cfg.beta = *beta;
    if (seed) cfg.seed = *seed;
    cfg.uot.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edit-vector optimal-transport scorer for grammatical error correction"};
  app.require_subcommand(1);
  int status = cli::kExitOk;

  auto* extract = app.add_subcommand("extract", "Extract edits from parallel source/corrected files into M2");
  cli::ExtractOptions extract_opts;
  std::string m2_out;
  extract->add_option("--src", extract_opts.src)->required();
  extract->add_option("--cor", extract_opts.cor)->required();
  extract->add_option("--m2-out", m2_out, "Write M2 here instead of stdout");
  extract->callback([&] {
    if (!m2_out.empty()) extract_opts.m2_out = m2_out;
    status = cli::cmd_extract(extract_opts, std::cout, std::cerr);
  });

  auto* enumerate = app.add_subcommand("enumerate", "List every sentence the scorer will embed");
  CorpusFlags enum_corpus;
  enum_corpus.attach(enumerate);
  std::string enum_mode = "remove";
  enumerate->add_option("--mode", enum_mode, "remove | add | both")->check(CLI::IsMember({"remove", "add", "both"}));
  enumerate->callback([&] {
    cli::EnumerateOptions o;
    o.corpus = enum_corpus.options();
    o.mode = enum_mode == "add" ? cli::EnumerateMode::Add
             : enum_mode == "both" ? cli::EnumerateMode::Both
                                   : cli::EnumerateMode::Remove;
    status = cli::cmd_enumerate(o, std::cout, std::cerr);
  });

  auto* score = app.add_subcommand("score", "Score hypotheses against references; prints a JSON report");
  CorpusFlags score_corpus;
  ConfigFlags score_config;
  score_corpus.attach(score);
  score_config.attach(score);
  std::string plans_out, baseline;
  std::size_t workers = 1;
  score->add_option("--plans-out", plans_out, "Write per-sentence transport plans as TSV");
  score->add_option("--baseline", baseline, "Also report an exact-match baseline")->check(CLI::IsMember({"errant"}));
  score->add_option("--workers", workers, "Sentences scored in parallel");
  score->callback([&] {
    cli::ScoreOptions o;
    o.corpus = score_corpus.options();
    try {
      o.config = score_config.resolve();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      status = cli::kExitInput;
      return;
    }
    if (!plans_out.empty()) o.plans_out = plans_out;
    o.errant_baseline = baseline == "errant";
    o.workers = workers;
    status = cli::cmd_score(o, std::cout, std::cerr);
  });

  auto* rank = app.add_subcommand("rank", "Aggregate sentence scores of several systems into a ranking");
  std::string rank_scores, rank_names, rank_method = "trueskill";
  std::optional<std::uint64_t> rank_seed;
  std::optional<double> rank_tie;
  rank->add_option("--scores", rank_scores, "Comma-separated score reports, one per system")->required();
  rank->add_option("--names", rank_names, "Comma-separated system names (default: file stems)");
  rank->add_option("--method", rank_method)->check(CLI::IsMember({"trueskill", "expected-wins"}));
  rank->add_option("--seed", rank_seed, "Comparison shuffle seed (default: from the first report)");
  rank->add_option("--tie-epsilon", rank_tie, "Score gap below which two systems tie");
  rank->callback([&] {
    cli::RankOptions o;
    o.scores = split_paths(rank_scores);
    o.names = split_names(rank_names);
    o.method = rank_method == "expected-wins" ? cli::RankMethod::ExpectedWins : cli::RankMethod::TrueSkill;
    o.seed = rank_seed;
    o.tie_epsilon = rank_tie;
    status = cli::cmd_rank(o, std::cout, std::cerr);
  });

  auto* correlate = app.add_subcommand("correlate", "Pearson and Spearman correlation of a ranking with human scores");
  cli::CorrelateOptions corr_opts;
  std::string corr_ranking, corr_human;
  correlate->add_option("--ranking", corr_ranking)->required();
  correlate->add_option("--human", corr_human, "TSV: system, [sentence,] score")->required();
  correlate->callback([&] {
    corr_opts.ranking = corr_ranking;
    corr_opts.human = corr_human;
    status = cli::cmd_correlate(corr_opts, std::cout, std::cerr);
  });

  auto* agreement = app.add_subcommand("agreement", "Per-pair agreement of metric and human pairwise outcomes");
  std::string agr_scores, agr_names, agr_human;
  double agr_tie = 1e-9;
  agreement->add_option("--metric-scores", agr_scores, "Comma-separated score reports, one per system")->required();
  agreement->add_option("--names", agr_names, "Comma-separated system names (default: file stems)");
  agreement->add_option("--human-scores", agr_human, "TSV: system, sentence, score")->required();
  agreement->add_option("--tie-epsilon", agr_tie);
  agreement->callback([&] {
    cli::AgreementOptions o;
    o.metric_scores = split_paths(agr_scores);
    o.names = split_names(agr_names);
    o.human = agr_human;
    o.tie_epsilon = agr_tie;
    status = cli::cmd_agreement(o, std::cout, std::cerr);
  });

  auto* norms = app.add_subcommand("norms", "Edit-vector norm statistics per edit type");
  CorpusFlags norms_corpus;
  ConfigFlags norms_config;
  norms_corpus.attach(norms);
  norms_config.attach(norms);
  norms->callback([&] {
    cli::NormsOptions o;
    o.corpus = norms_corpus.options();
    try {
      o.config = norms_config.resolve();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      status = cli::kExitInput;
      return;
    }
    status = cli::cmd_norms(o, std::cout, std::cerr);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInput;
  }
  return status;
}
