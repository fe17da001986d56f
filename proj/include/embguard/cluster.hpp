#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embguard/linalg.hpp"
#include "embguard/store.hpp"

namespace embguard {

enum class ClusterAlgo { kmeans, gmm };

ClusterAlgo cluster_algo_from_name(const std::string& name);  // "kmeans" | "gmm"
const char* cluster_algo_name(ClusterAlgo algo);

struct Clustering {
  std::vector<int> assignment;          // one label per store row
  std::vector<linalg::Vec> centroids;   // exact means of assigned members
  std::size_t cluster_count() const { return centroids.size(); }
};

// Partitions store rows into n groups. kmeans: k-means++ seeding then Lloyd
// iterations until the max centroid shift drops below 1e-6 or 300 rounds.
// gmm: diagonal-covariance EM initialized from the kmeans result, hard
// assignment by max responsibility. Ties in assignment go to the lowest
// cluster index. Deterministic for a fixed seed and any worker count.
// Throws too_many_clusters when n exceeds the row count.
Clustering cluster_store(const EmbeddingStore& store, std::size_t n, ClusterAlgo algo,
                         std::uint64_t seed);

}  // namespace embguard
