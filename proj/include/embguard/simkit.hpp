#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "embguard/corpus.hpp"
#include "embguard/linalg.hpp"
#include "embguard/store.hpp"

namespace embguard {

// Knobs for the synthetic world. The "semantic" store plays the victim
// embedding model; the "standard" store plays an independent reference model
// (a seeded rotation of the same space plus noise, so pairwise geometry is
// rank-correlated but the coordinate frame differs).
struct SimConfig {
  std::size_t vocab_size = 5000;
  std::size_t doc_count = 2000;
  std::size_t doc_len_min = 20;
  std::size_t doc_len_max = 60;
  double zipf_exponent = 1.05;
  // Keep doc_count / topic_count comfortably above utility_k so a rank-50
  // elimination basis cannot wipe out every topic anchor at once.
  std::size_t topic_count = 160;
  std::size_t dim = 256;
  double semantic_noise = 0.05;           // sigma_v
  double standard_rotation_angle = 0.35;  // theta, radians
  double standard_noise = 0.02;           // sigma_s
  std::uint64_t seed = 7;
};

// Throws invalid_config naming the offending field.
void validate_config(const SimConfig& cfg);

SimConfig load_sim_config(const std::string& path);
void save_sim_config(const SimConfig& cfg, const std::string& path);

// JSON round-trip; absent fields keep their defaults. Validates on parse.
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimConfig& cfg);

// Zipf-distributed tokens "tok00001"... over uniformly random doc lengths;
// each document carries a latent topic label (transient, not serialized).
Corpus gen_corpus(const SimConfig& cfg);

// One seeded unit anchor per topic; row = normalize(anchor + sigma_v * g).
// Requires topic labels (a corpus fresh from gen_corpus).
EmbeddingStore gen_semantic_embeddings(const Corpus& corpus, const SimConfig& cfg);

// Fixed seeded plane rotations by theta applied to every row, then sigma_s
// Gaussian noise and renormalization.
EmbeddingStore gen_standard_embeddings(const EmbeddingStore& semantic, const SimConfig& cfg);

// Mean Jaccard overlap of the k-nearest-neighbor sets (by cosine) computed
// per id between the two stores. 1.0 = identical neighborhoods.
double utility_score(const EmbeddingStore& a, const EmbeddingStore& b, std::size_t k);

// Query-side victim model for texts outside the generated corpus (probe
// texts): the mean of seeded per-token unit directions, normalized. Shares
// the config seed so it is consistent across runs.
class SemanticModel {
 public:
  explicit SemanticModel(const SimConfig& cfg);
  linalg::Vec embed_query(const Document& doc) const;
  std::size_t dim() const { return cfg_.dim; }

 private:
  SimConfig cfg_;
};

}  // namespace embguard
