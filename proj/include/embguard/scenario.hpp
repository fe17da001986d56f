#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "embguard/attack.hpp"
#include "embguard/cluster.hpp"
#include "embguard/simkit.hpp"
#include "embguard/verify.hpp"

namespace embguard {

// Stage-seed salts fanned out from one master seed. The CLI applies the same
// fan-out to its --seed flags, so a command pipeline with seed S reproduces
// run_scenario with sim.seed = S bit for bit.
namespace stage_salt {
inline constexpr std::uint64_t trigger_pick = 0x5431;
inline constexpr std::uint64_t partition = 0x5432;
inline constexpr std::uint64_t key = 0x5433;
inline constexpr std::uint64_t cluster = 0x5434;
inline constexpr std::uint64_t attack = 0x5435;
inline constexpr std::uint64_t probes = 0x5436;
}  // namespace stage_salt

// One end-to-end synthetic experiment: generate world, watermark, attack,
// verify, reconstruct, score utility. This is the engine behind the sweep
// command; tests drive it directly.
struct ScenarioParams {
  SimConfig sim;

  // Provider side. The band sits higher than the watermark command's default
  // so trigger documents accumulate several hits; together with the deeper
  // saturation level m this keeps per-document weights small (soft injection)
  // while multi-hit rows still expose the target direction to reconstruction.
  std::size_t n_triggers = 20;
  double trigger_lo = 0.04;
  double trigger_hi = 0.08;
  std::size_t R = 1;
  std::size_t m = 8;
  bool orthogonalize = false;

  // Attacker side.
  std::size_t clusters = 20;
  ClusterAlgo algo = ClusterAlgo::kmeans;
  double percentile = 99.5;
  std::size_t min_pair_count = 1;
  std::size_t K = 50;

  // Verifier side.
  std::size_t probes_per_class = 200;
  VerificationThresholds thresholds;

  std::size_t utility_k = 10;
};

struct ScenarioResult {
  Corpus corpus;
  EmbeddingStore semantic;
  EmbeddingStore standard;
  WatermarkKey key;
  EmbeddingStore provided;
  double exposure = 0.0;  // fraction of docs carrying >= 1 trigger

  Clustering clustering;
  SuspicionReport suspicion;
  EliminationBasis basis;
  EmbeddingStore cleansed;

  VerificationReport pre_attack;   // retrieval embedder over provided
  VerificationReport post_attack;  // retrieval embedder over cleansed
  ReconstructionResult reconstruction;
  double utility = 0.0;  // cleansed vs semantic
};

// All stage seeds derive from params.sim.seed.
ScenarioResult run_scenario(const ScenarioParams& params);

// JSON round-trip; absent fields keep their defaults.
ScenarioParams scenario_params_from_json(const nlohmann::json& j);
nlohmann::json scenario_params_to_json(const ScenarioParams& params);
ScenarioParams load_scenario_params(const std::string& path);

}  // namespace embguard
