#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embguard/corpus.hpp"
#include "embguard/linalg.hpp"
#include "embguard/store.hpp"
#include "embguard/triggers.hpp"

namespace embguard {

// Secret watermark material. Everything needed to reproduce injection and to
// run verification lives here; treat serialized keys as sensitive.
struct WatermarkKey {
  std::size_t dim = 0;
  std::size_t R = 0;  // number of directions
  std::size_t m = 4;  // occurrence saturation level for the weights
  std::uint64_t seed = 0;
  bool orthogonalized = false;
  std::vector<linalg::Vec> targets;  // R unit vectors
  TriggerPartition partition;        // R subsets
};

// Draws R unit target directions from the seed; optionally orthogonalizes
// them (throws too_many_watermarks when R > dim in that case). The partition
// must have exactly R subsets.
WatermarkKey generate_key(std::size_t dim, std::size_t R, std::uint64_t seed,
                          bool orthogonalize, TriggerPartition partition, std::size_t m);

// Mixes the target directions into one embedding:
//   normalize((1 - sum(lambdas)) * e + sum_r lambdas[r] * target[r]).
// A text with no trigger hits (total == 0) passes through byte-identical.
linalg::Vec inject(const linalg::Vec& e, const WeightVector& weights, const WatermarkKey& key);

struct WatermarkStats {
  std::size_t docs_with_triggers = 0;  // rows with at least one hit
};

// Applies inject to every row, matching rows to corpus documents by id
// (throws missing_document when a row has no document). Order preserved.
EmbeddingStore watermark_store(const EmbeddingStore& store, const Corpus& corpus,
                               const WatermarkKey& key, WatermarkStats* stats = nullptr);

WatermarkKey load_key(const std::string& path);
void save_key(const WatermarkKey& key, const std::string& path);

}  // namespace embguard
