#include "uoterrant/cli/config.hpp"

#include <fstream>
#include <set>

#include "uoterrant/errors.hpp"

namespace uoterrant::cli {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    if (!known.count(key)) throw Error("unknown config key '" + key + "'" + where);
  }
}

}  // namespace

const char* to_string(VectorizeMode m) { return m == VectorizeMode::Remove ? "remove" : "add"; }
const char* to_string(MassMode m) { return m == MassMode::L2Norm ? "l2" : "uniform"; }
const char* to_string(CostMode m) { return m == CostMode::Euclidean ? "euclidean" : "cosine"; }

VectorizeMode parse_vectorize_mode(const std::string& s) {
  if (s == "remove") return VectorizeMode::Remove;
  if (s == "add") return VectorizeMode::Add;
  throw Error("vectorization must be 'remove' or 'add', got '" + s + "'");
}

MassMode parse_mass_mode(const std::string& s) {
  if (s == "l2") return MassMode::L2Norm;
  if (s == "uniform") return MassMode::Uniform;
  throw Error("mass must be 'l2' or 'uniform', got '" + s + "'");
}

CostMode parse_cost_mode(const std::string& s) {
  if (s == "euclidean") return CostMode::Euclidean;
  if (s == "cosine") return CostMode::CosineDistance;
  throw Error("cost must be 'euclidean' or 'cosine', got '" + s + "'");
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto ts = cfg.effective_trueskill();
  return {
      {"embedder", cfg.embedder},
      {"vectorization", to_string(cfg.vectorize)},
      {"mass", to_string(cfg.mass)},
      {"cost", to_string(cfg.cost)},
      {"epsilon", cfg.uot.epsilon},
      {"lambda1", cfg.uot.lambda1},
      {"lambda2", cfg.uot.lambda2},
      {"max_iters", cfg.uot.max_iters},
      {"tol", cfg.uot.tol},
      {"absorb_threshold", cfg.uot.absorb_threshold},
      {"beta", cfg.beta},
      {"tie_epsilon", cfg.tie_epsilon},
      {"seed", cfg.seed},
      {"trueskill",
       {{"mu0", ts.mu0},
        {"sigma0", ts.sigma0},
        {"beta", ts.beta},
        {"tau", ts.tau},
        {"draw_probability", ts.draw_probability}}},
  };
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  reject_unknown(j,
                 {"embedder", "vectorization", "mass", "cost", "epsilon", "lambda1", "lambda2", "max_iters", "tol",
                  "absorb_threshold", "beta", "tie_epsilon", "seed", "trueskill"},
                 "");
  RunConfig cfg;
  read_if(j, "embedder", cfg.embedder);
  std::string mode;
  if (j.contains("vectorization")) {
    read_if(j, "vectorization", mode);
    cfg.vectorize = parse_vectorize_mode(mode);
  }
  if (j.contains("mass")) {
    read_if(j, "mass", mode);
    cfg.mass = parse_mass_mode(mode);
  }
  if (j.contains("cost")) {
    read_if(j, "cost", mode);
    cfg.cost = parse_cost_mode(mode);
  }
  read_if(j, "epsilon", cfg.uot.epsilon);
  read_if(j, "lambda1", cfg.uot.lambda1);
  read_if(j, "lambda2", cfg.uot.lambda2);
  read_if(j, "max_iters", cfg.uot.max_iters);
  read_if(j, "tol", cfg.uot.tol);
  read_if(j, "absorb_threshold", cfg.uot.absorb_threshold);
  read_if(j, "beta", cfg.beta);
  read_if(j, "tie_epsilon", cfg.tie_epsilon);
  read_if(j, "seed", cfg.seed);
  if (j.contains("trueskill")) {
    const auto& t = j.at("trueskill");
    if (!t.is_object()) throw Error("config key 'trueskill' must be an object");
    reject_unknown(t, {"mu0", "sigma0", "beta", "tau", "draw_probability"}, " in 'trueskill'");
    read_if(t, "mu0", cfg.trueskill.mu0);
    read_if(t, "sigma0", cfg.trueskill.sigma0);
    // beta and tau follow sigma0 unless given explicitly.
    cfg.trueskill.beta = cfg.trueskill.sigma0 / 2.0;
    cfg.trueskill.tau = cfg.trueskill.sigma0 / 100.0;
    read_if(t, "beta", cfg.trueskill.beta);
    read_if(t, "tau", cfg.trueskill.tau);
    read_if(t, "draw_probability", cfg.trueskill.draw_probability);
  }
  cfg.uot.validate();
  cfg.trueskill.validate();
  if (!(cfg.beta > 0.0)) throw Error("beta must be positive");
  if (cfg.tie_epsilon < 0.0) throw Error("tie_epsilon must be non-negative");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace uoterrant::cli
