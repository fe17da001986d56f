#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embguard/cluster.hpp"
#include "embguard/linalg.hpp"
#include "embguard/store.hpp"
#include "embguard/watermark.hpp"

namespace embguard {

// One unordered pair inside a cluster. d_v/d_s are cosine similarities in
// the provided (victim) and standard reference spaces; disparity is the
// difference of their normalized within-cluster ranks, in [-1, 1]. High
// disparity = pair looks unusually similar in the provided space.
struct PairDisparity {
  std::uint32_t i = 0, j = 0;  // store row indices, i < j
  double d_v = 0.0;
  double d_s = 0.0;
  double disparity = 0.0;
};

struct ClusterPairs {
  std::size_t cluster = 0;
  std::vector<PairDisparity> pairs;
};

struct SuspicionReport {
  std::vector<ClusterPairs> clusters;
  // Filled by select_suspects:
  std::vector<std::string> suspects;       // flagged-count desc, then id
  std::vector<std::size_t> suspect_rows;   // same rows, ascending store index
  double percentile = 0.0;
  std::size_t min_pair_count = 0;
  double threshold = 0.0;                  // disparity cut actually applied
};

// Average-rank, ascending, normalized to [0,1] by (rank-1)/(P-1); a single
// element gets 0.
std::vector<double> normalized_ranks(const std::vector<double>& values);

// Enumerates unordered pairs within each cluster (seeded subsample of
// pair_cap when a cluster exceeds it) and computes rank disparities.
// Both stores must hold the same id set.
SuspicionReport pair_disparities(const Clustering& clustering, const EmbeddingStore& provided,
                                 const EmbeddingStore& standard,
                                 std::size_t pair_cap = 200000, std::uint64_t seed = 0);

// Flags pairs with disparity >= the global percentile cut (nearest-rank) and
// marks ids appearing in >= min_pair_count flagged pairs as suspects.
void select_suspects(SuspicionReport& report, const EmbeddingStore& provided,
                     double percentile, std::size_t min_pair_count);

struct EliminationBasis {
  linalg::OrthonormalBasis components;
  std::vector<double> singular_values;   // descending, positive
  std::vector<std::string> fitted_on;    // suspect ids used
  std::size_t requested_k = 0;
  bool rank_deficient = false;
};

// Top-K right singular vectors of the uncentered suspect rows. When fewer
// than K independent directions exist the prefix is returned with
// rank_deficient set.
EliminationBasis fit_basis(const EmbeddingStore& provided,
                           const std::vector<std::size_t>& suspect_rows, std::size_t K);

struct EliminateResult {
  EmbeddingStore store;
  std::vector<std::string> degenerate_ids;  // rows replaced by random fill
};

// Iteratively removes every basis component from every row (per-step
// renormalization). Rows that collapse (parallel to the basis span) are
// replaced by a seeded random unit vector pushed through the same removal
// chain, and reported. seed feeds only those replacements.
EliminateResult eliminate(const EmbeddingStore& store, const linalg::OrthonormalBasis& basis,
                          std::uint64_t seed = 0);

struct TargetReconstruction {
  std::vector<double> alpha;
  linalg::Vec recovered;   // unit, or zero when the combination collapses
  double cos_to_target = 0.0;
};

struct ReconstructionResult {
  std::vector<TargetReconstruction> per_watermark;
  double min_cos = 0.0;
};

// Least-squares combination of basis components against each key target;
// evaluation-only (needs the secret key).
ReconstructionResult reconstruct_target(const EliminationBasis& basis, const WatermarkKey& key);

// eliminate() with the basis spanned by the key's own targets.
EliminateResult known_target_eliminate(const EmbeddingStore& store, const WatermarkKey& key,
                                       std::uint64_t seed = 0);

// Serialization. The basis uses the embedding-store format with ids pc_0001….
void save_suspicion_report(const SuspicionReport& report, const EmbeddingStore& provided,
                           const std::string& path);
void save_basis(const EliminationBasis& basis, const std::string& path);
linalg::OrthonormalBasis load_basis(const std::string& path);
void save_reconstruction(const ReconstructionResult& result, const std::string& path);

}  // namespace embguard
