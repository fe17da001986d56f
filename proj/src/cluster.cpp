#include "embguard/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"
#include "embguard/rng.hpp"

namespace embguard {

namespace {

constexpr double kShiftTol = 1e-6;
constexpr int kMaxRounds = 300;
constexpr std::uint64_t kSaltSeeding = 0x6b6d; /* "km" */

using linalg::Vec;

// Nearest centroid by squared distance, lowest index on ties.
std::size_t nearest(const Vec& x, const std::vector<Vec>& centroids) {
  std::size_t arg = 0;
  double best = linalg::squared_distance(x, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = linalg::squared_distance(x, centroids[c]);
    if (d < best) {
      best = d;
      arg = c;
    }
  }
  return arg;
}

std::vector<Vec> kmeanspp_seed(const std::vector<Vec>& rows, std::size_t n, Rng& rng) {
  std::vector<Vec> centroids;
  centroids.reserve(n);
  centroids.push_back(rows[static_cast<std::size_t>(rng.below(rows.size()))]);
  std::vector<double> d2(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    d2[i] = linalg::squared_distance(rows[i], centroids[0]);
  });
  while (centroids.size() < n) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick;
    if (total <= linalg::kEpsZero) {
      // All remaining points coincide with a centroid; any choice works but
      // it must be deterministic.
      pick = static_cast<std::size_t>(rng.below(rows.size()));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = rows.size() - 1;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    centroids.push_back(rows[pick]);
    const Vec& latest = centroids.back();
    parallel_for(rows.size(), [&](std::size_t i) {
      d2[i] = std::min(d2[i], linalg::squared_distance(rows[i], latest));
    });
  }
  return centroids;
}

// Lloyd iterations. Assignment is parallel (writes only slot i); the mean
// accumulation walks rows in index order so results do not depend on the
// worker count.
Clustering run_kmeans(const std::vector<Vec>& rows, std::size_t n, std::uint64_t seed) {
  const std::size_t dim = rows[0].size();
  Rng rng(Rng::derive(seed, kSaltSeeding));
  std::vector<Vec> centroids = kmeanspp_seed(rows, n, rng);
  std::vector<int> assignment(rows.size(), 0);

  for (int round = 0; round < kMaxRounds; ++round) {
    parallel_for(rows.size(), [&](std::size_t i) {
      assignment[i] = static_cast<int>(nearest(rows[i], centroids));
    });
    std::vector<Vec> sums(n, Vec(dim, 0.0));
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto c = static_cast<std::size_t>(assignment[i]);
      ++counts[c];
      for (std::size_t k = 0; k < dim; ++k) sums[c][k] += rows[i][k];
    }
    // Re-seed empty clusters on the row farthest from its centroid; claimed
    // rows move immediately so the means stay consistent with assignment.
    for (std::size_t c = 0; c < n; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = rows.size();
      double best = -1.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto ci = static_cast<std::size_t>(assignment[i]);
        if (counts[ci] <= 1) continue;  // do not orphan another cluster
        const double d = linalg::squared_distance(rows[i], centroids[ci]);
        if (d > best) {
          best = d;
          far = i;
        }
      }
      require(far < rows.size(), errc::internal, "kmeans: cannot repopulate empty cluster");
      const auto old = static_cast<std::size_t>(assignment[far]);
      assignment[far] = static_cast<int>(c);
      --counts[old];
      ++counts[c];
      for (std::size_t k = 0; k < dim; ++k) {
        sums[old][k] -= rows[far][k];
        sums[c][k] += rows[far][k];
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      Vec mean(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        mean[k] = sums[c][k] / static_cast<double>(counts[c]);
      }
      shift = std::max(shift, std::sqrt(linalg::squared_distance(mean, centroids[c])));
      centroids[c] = std::move(mean);
    }
    // Centroids are now exact means of the current assignment, which is the
    // state the caller relies on; stop only after that update.
    if (shift < kShiftTol) break;
  }
  Clustering out;
  out.assignment = std::move(assignment);
  out.centroids = std::move(centroids);
  return out;
}

Clustering run_gmm(const std::vector<Vec>& rows, std::size_t n, std::uint64_t seed) {
  const std::size_t dim = rows[0].size();
  const std::size_t count = rows.size();
  Clustering init = run_kmeans(rows, n, seed);
  if (n == 1 || n == count) return init;  // EM cannot improve either extreme

  std::vector<Vec> means = init.centroids;
  // Shared diagonal variance from the global spread, floored to keep the
  // densities proper when a cluster collapses.
  constexpr double kVarFloor = 1e-6;
  std::vector<Vec> vars(n, Vec(dim, 0.0));
  {
    Vec gmean(dim, 0.0);
    for (const auto& r : rows)
      for (std::size_t k = 0; k < dim; ++k) gmean[k] += r[k];
    for (auto& x : gmean) x /= static_cast<double>(count);
    Vec gvar(dim, 0.0);
    for (const auto& r : rows)
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = r[k] - gmean[k];
        gvar[k] += d * d;
      }
    for (auto& x : gvar) x = std::max(kVarFloor, x / static_cast<double>(count));
    for (auto& v : vars) v = gvar;
  }
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<double> resp(count * n);

  for (int round = 0; round < kMaxRounds; ++round) {
    // E step: responsibilities via log densities + logsumexp, one row per i.
    parallel_for(count, [&](std::size_t i) {
      double* ri = resp.data() + i * n;
      double lmax = -1e300;
      for (std::size_t c = 0; c < n; ++c) {
        double lp = std::log(weights[c]);
        for (std::size_t k = 0; k < dim; ++k) {
          const double d = rows[i][k] - means[c][k];
          lp -= 0.5 * (std::log(2.0 * M_PI * vars[c][k]) + d * d / vars[c][k]);
        }
        ri[c] = lp;
        lmax = std::max(lmax, lp);
      }
      double z = 0.0;
      for (std::size_t c = 0; c < n; ++c) z += std::exp(ri[c] - lmax);
      const double lz = lmax + std::log(z);
      for (std::size_t c = 0; c < n; ++c) ri[c] = std::exp(ri[c] - lz);
    });
    // M step in row order (deterministic sums).
    std::vector<double> nk(n, 0.0);
    std::vector<Vec> msum(n, Vec(dim, 0.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double* ri = resp.data() + i * n;
      for (std::size_t c = 0; c < n; ++c) {
        nk[c] += ri[c];
        for (std::size_t k = 0; k < dim; ++k) msum[c][k] += ri[c] * rows[i][k];
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      nk[c] = std::max(nk[c], 1e-10);
      Vec mean(dim);
      for (std::size_t k = 0; k < dim; ++k) mean[k] = msum[c][k] / nk[c];
      shift = std::max(shift, std::sqrt(linalg::squared_distance(mean, means[c])));
      means[c] = std::move(mean);
      weights[c] = nk[c] / static_cast<double>(count);
    }
    std::vector<Vec> vsum(n, Vec(dim, 0.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double* ri = resp.data() + i * n;
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t k = 0; k < dim; ++k) {
          const double d = rows[i][k] - means[c][k];
          vsum[c][k] += ri[c] * d * d;
        }
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < dim; ++k) {
        vars[c][k] = std::max(kVarFloor, vsum[c][k] / nk[c]);
      }
    }
    if (shift < kShiftTol) break;
  }

  Clustering out;
  out.assignment.assign(count, 0);
  parallel_for(count, [&](std::size_t i) {
    const double* ri = resp.data() + i * n;
    std::size_t arg = 0;
    for (std::size_t c = 1; c < n; ++c) {
      if (ri[c] > ri[arg]) arg = c;
    }
    out.assignment[i] = static_cast<int>(arg);
  });
  // Hard assignment changed the membership, so recompute exact means; empty
  // clusters keep their EM mean (no members to average).
  std::vector<Vec> sums(n, Vec(dim, 0.0));
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = static_cast<std::size_t>(out.assignment[i]);
    ++counts[c];
    for (std::size_t k = 0; k < dim; ++k) sums[c][k] += rows[i][k];
  }
  out.centroids.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (counts[c] == 0) {
      out.centroids[c] = means[c];
      continue;
    }
    Vec mean(dim);
    for (std::size_t k = 0; k < dim; ++k) mean[k] = sums[c][k] / static_cast<double>(counts[c]);
    out.centroids[c] = std::move(mean);
  }
  return out;
}

}  // namespace

ClusterAlgo cluster_algo_from_name(const std::string& name) {
  if (name == "kmeans") return ClusterAlgo::kmeans;
  if (name == "gmm") return ClusterAlgo::gmm;
  fail(errc::invalid_config, "unknown clustering algorithm: " + name);
}

const char* cluster_algo_name(ClusterAlgo algo) {
  return algo == ClusterAlgo::gmm ? "gmm" : "kmeans";
}

Clustering cluster_store(const EmbeddingStore& store, std::size_t n, ClusterAlgo algo,
                         std::uint64_t seed) {
  require(n >= 1, errc::invalid_config, "cluster_store: n must be >= 1");
  require(store.size() > 0, errc::invalid_config, "cluster_store: empty store");
  if (n > store.size()) {
    fail(errc::too_many_clusters, "cluster_store: " + std::to_string(n) + " clusters for " +
                                      std::to_string(store.size()) + " rows");
  }
  return algo == ClusterAlgo::kmeans ? run_kmeans(store.rows, n, seed)
                                     : run_gmm(store.rows, n, seed);
}

}  // namespace embguard
