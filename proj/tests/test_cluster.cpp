#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "embguard/cluster.hpp"
#include "embguard/error.hpp"
#include "embguard/rng.hpp"

using namespace embguard;
using linalg::Vec;

namespace {

// Three tight unit-norm blobs around orthogonal poles; separation is huge
// compared to the within-blob spread.
EmbeddingStore three_blobs(std::size_t per_blob, std::uint64_t seed) {
  EmbeddingStore s;
  s.dim = 16;
  Rng rng(seed);
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      Vec v(16, 0.0);
      v[b] = 1.0;
      for (auto& x : v) x += 0.01 * rng.gaussian();
      s.ids.push_back("b" + std::to_string(b) + "_" + std::to_string(i));
      s.rows.push_back(linalg::normalize(v));
    }
  }
  return s;
}

// Fraction of row pairs on whose co-membership the two labelings agree.
double pair_agreement(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t same = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      ++total;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++same;
    }
  return static_cast<double>(same) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("algo names round-trip") {
  CHECK(cluster_algo_from_name("kmeans") == ClusterAlgo::kmeans);
  CHECK(cluster_algo_from_name("gmm") == ClusterAlgo::gmm);
  CHECK(cluster_algo_name(ClusterAlgo::gmm) == std::string("gmm"));
  CHECK_THROWS_AS(cluster_algo_from_name("dbscan"), Error);
}

TEST_CASE("three separated blobs are recovered exactly") {
  auto store = three_blobs(40, 5);
  std::vector<int> truth;
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 40; ++i) truth.push_back(b);
  for (auto algo : {ClusterAlgo::kmeans, ClusterAlgo::gmm}) {
    auto c = cluster_store(store, 3, algo, 11);
    REQUIRE(c.assignment.size() == store.size());
    CHECK(pair_agreement(c.assignment, truth) == 1.0);
  }
}

TEST_CASE("n=1 puts everything in one cluster whose centroid is the mean") {
  auto store = three_blobs(10, 6);
  auto c = cluster_store(store, 1, ClusterAlgo::kmeans, 3);
  CHECK(c.cluster_count() == 1);
  for (int a : c.assignment) CHECK(a == 0);
  Vec mean(store.dim, 0.0);
  for (const auto& r : store.rows)
    for (std::size_t j = 0; j < store.dim; ++j) mean[j] += r[j];
  for (auto& x : mean) x /= static_cast<double>(store.size());
  for (std::size_t j = 0; j < store.dim; ++j)
    CHECK(c.centroids[0][j] == doctest::Approx(mean[j]).epsilon(1e-12));
}

TEST_CASE("n equal to the row count isolates every row") {
  auto store = three_blobs(4, 7);  // 12 rows
  auto c = cluster_store(store, 12, ClusterAlgo::kmeans, 9);
  std::set<int> labels(c.assignment.begin(), c.assignment.end());
  CHECK(labels.size() == 12);
  CHECK_THROWS_AS(cluster_store(store, 13, ClusterAlgo::kmeans, 9), Error);
}

TEST_CASE("centroids are the exact means of their members") {
  auto store = three_blobs(15, 8);
  auto c = cluster_store(store, 3, ClusterAlgo::kmeans, 21);
  std::map<int, std::pair<Vec, std::size_t>> acc;
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& [sum, count] = acc[c.assignment[i]];
    if (sum.empty()) sum.assign(store.dim, 0.0);
    for (std::size_t j = 0; j < store.dim; ++j) sum[j] += store.rows[i][j];
    ++count;
  }
  for (auto& [label, sc] : acc) {
    for (std::size_t j = 0; j < store.dim; ++j) {
      const double mean = sc.first[j] / static_cast<double>(sc.second);
      CHECK(c.centroids[static_cast<std::size_t>(label)][j] ==
            doctest::Approx(mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("clustering is deterministic per seed, for both algorithms") {
  auto store = three_blobs(30, 9);
  for (auto algo : {ClusterAlgo::kmeans, ClusterAlgo::gmm}) {
    auto a = cluster_store(store, 5, algo, 13);
    auto b = cluster_store(store, 5, algo, 13);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
  }
}

TEST_CASE("duplicate-heavy input still yields the requested cluster count") {
  // More clusters than distinct points forces the empty-cluster reseed path.
  EmbeddingStore s;
  s.dim = 4;
  for (int i = 0; i < 9; ++i) {
    Vec v(4, 0.0);
    v[static_cast<std::size_t>(i % 2)] = 1.0;  // only two distinct points
    s.ids.push_back("r" + std::to_string(i));
    s.rows.push_back(v);
  }
  auto c = cluster_store(s, 4, ClusterAlgo::kmeans, 17);
  CHECK(c.cluster_count() == 4);
  CHECK(c.assignment.size() == 9);
  for (int a : c.assignment) {
    CHECK(a >= 0);
    CHECK(a < 4);
  }
}
