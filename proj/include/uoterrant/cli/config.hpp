#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "uoterrant/editvec.hpp"
#include "uoterrant/metaeval.hpp"
#include "uoterrant/uot.hpp"

namespace uoterrant::cli {

/// Everything that influences a run's output. Defaults reproduce the metric's
/// reference configuration (eps = lambda1 = lambda2 = 0.1, F0.5).
struct RunConfig {
  std::string embedder = "test";
  VectorizeMode vectorize = VectorizeMode::Remove;
  MassMode mass = MassMode::L2Norm;
  CostMode cost = CostMode::Euclidean;
  UotConfig uot;
  double beta = 0.5;
  double tie_epsilon = 1e-9;
  TrueSkillParams trueskill;
  std::uint64_t seed = 0;

  // The shuffle seed always follows `seed`.
  TrueSkillParams effective_trueskill() const {
    auto p = trueskill;
    p.shuffle_seed = seed;
    return p;
  }
};

const char* to_string(VectorizeMode m);
const char* to_string(MassMode m);
const char* to_string(CostMode m);
VectorizeMode parse_vectorize_mode(const std::string& s);
MassMode parse_mass_mode(const std::string& s);
CostMode parse_cost_mode(const std::string& s);

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace uoterrant::cli
