#include "embguard/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"
#include "embguard/rng.hpp"

namespace embguard {

using nlohmann::json;
using linalg::Vec;

namespace {
constexpr std::uint64_t kSaltPairSample = 0x7073; /* "ps" */
constexpr std::uint64_t kSaltReplacement = 0xe11e;
}  // namespace

std::vector<double> normalized_ranks(const std::vector<double>& values) {
  const std::size_t P = values.size();
  std::vector<double> out(P, 0.0);
  if (P <= 1) return out;
  std::vector<std::size_t> idx(P);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  const double denom = static_cast<double>(P - 1);
  std::size_t lo = 0;
  while (lo < P) {
    std::size_t hi = lo;
    while (hi + 1 < P && values[idx[hi + 1]] == values[idx[lo]]) ++hi;
    // 0-based average rank of the tie run; (rank-1)/(P-1) in 1-based terms.
    const double r = 0.5 * static_cast<double>(lo + hi) / denom;
    for (std::size_t k = lo; k <= hi; ++k) out[idx[k]] = r;
    lo = hi + 1;
  }
  return out;
}

SuspicionReport pair_disparities(const Clustering& clustering, const EmbeddingStore& provided,
                                 const EmbeddingStore& standard, std::size_t pair_cap,
                                 std::uint64_t seed) {
  require(pair_cap >= 1, errc::invalid_config, "pair_disparities: pair_cap must be >= 1");
  if (provided.size() != standard.size()) {
    fail(errc::id_mismatch, "pair_disparities: store sizes differ");
  }
  require(clustering.assignment.size() == provided.size(), errc::invalid_config,
          "pair_disparities: clustering size mismatch");
  // Map provided rows onto standard rows by id (order may differ).
  std::vector<std::size_t> std_row(provided.size());
  for (std::size_t i = 0; i < provided.size(); ++i) {
    const std::ptrdiff_t j = standard.index_of(provided.ids[i]);
    if (j < 0) {
      fail(errc::id_mismatch, "pair_disparities: id " + provided.ids[i] + " not in standard");
    }
    std_row[i] = static_cast<std::size_t>(j);
  }

  const std::size_t n = clustering.cluster_count();
  std::vector<std::vector<std::uint32_t>> members(n);
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    members[static_cast<std::size_t>(clustering.assignment[i])].push_back(
        static_cast<std::uint32_t>(i));
  }

  SuspicionReport report;
  report.clusters.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    report.clusters[c].cluster = c;
    const auto& rows = members[c];
    if (rows.size() < 2) continue;
    const std::size_t s = rows.size();
    const std::size_t total_pairs = s * (s - 1) / 2;
    auto& pairs = report.clusters[c].pairs;
    if (total_pairs <= pair_cap) {
      pairs.reserve(total_pairs);
      for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = a + 1; b < s; ++b) {
          pairs.push_back({rows[a], rows[b], 0.0, 0.0, 0.0});
        }
      }
    } else {
      // Seeded subsample of distinct pair codes, then sorted so downstream
      // order does not depend on hash-set iteration.
      Rng rng(Rng::derive(seed, kSaltPairSample + c));
      std::unordered_set<std::uint64_t> picked;
      picked.reserve(pair_cap * 2);
      while (picked.size() < pair_cap) {
        picked.insert(rng.below(total_pairs));
      }
      std::vector<std::uint64_t> codes(picked.begin(), picked.end());
      std::sort(codes.begin(), codes.end());
      pairs.reserve(pair_cap);
      for (const std::uint64_t code : codes) {
        // Decode a triangular index: pair (a, b), a < b.
        std::size_t a = 0;
        std::uint64_t rem = code;
        std::uint64_t run = s - 1;
        while (rem >= run) {
          rem -= run;
          --run;
          ++a;
        }
        const std::size_t b = a + 1 + static_cast<std::size_t>(rem);
        pairs.push_back({rows[a], rows[b], 0.0, 0.0, 0.0});
      }
    }
    parallel_for(pairs.size(), [&](std::size_t p) {
      auto& pr = pairs[p];
      pr.d_v = linalg::cosine(provided.rows[pr.i], provided.rows[pr.j]);
      pr.d_s = linalg::cosine(standard.rows[std_row[pr.i]], standard.rows[std_row[pr.j]]);
    });
    std::vector<double> dv(pairs.size()), ds(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      dv[p] = pairs[p].d_v;
      ds[p] = pairs[p].d_s;
    }
    const auto rv = normalized_ranks(dv);
    const auto rs = normalized_ranks(ds);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      pairs[p].disparity = rv[p] - rs[p];
    }
  }
  return report;
}

void select_suspects(SuspicionReport& report, const EmbeddingStore& provided,
                     double percentile, std::size_t min_pair_count) {
  require(percentile > 0.0 && percentile < 100.0, errc::invalid_config,
          "select_suspects: percentile must be in (0, 100)");
  require(min_pair_count >= 1, errc::invalid_config,
          "select_suspects: min_pair_count must be >= 1");
  std::vector<double> all;
  for (const auto& cl : report.clusters) {
    for (const auto& pr : cl.pairs) all.push_back(pr.disparity);
  }
  report.percentile = percentile;
  report.min_pair_count = min_pair_count;
  report.suspects.clear();
  report.suspect_rows.clear();
  if (all.empty()) {
    report.threshold = 0.0;
    return;
  }
  std::sort(all.begin(), all.end());
  // Nearest-rank percentile; >= comparison makes the all-equal case flag
  // everything rather than nothing.
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(all.size())));
  const std::size_t cut = std::min(std::max<std::size_t>(rank, 1), all.size()) - 1;
  report.threshold = all[cut];

  std::vector<std::size_t> flag_count(provided.size(), 0);
  for (const auto& cl : report.clusters) {
    for (const auto& pr : cl.pairs) {
      if (pr.disparity >= report.threshold) {
        ++flag_count[pr.i];
        ++flag_count[pr.j];
      }
    }
  }
  for (std::size_t i = 0; i < provided.size(); ++i) {
    if (flag_count[i] >= min_pair_count) report.suspect_rows.push_back(i);
  }
  std::vector<std::size_t> order = report.suspect_rows;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (flag_count[a] != flag_count[b]) return flag_count[a] > flag_count[b];
    return provided.ids[a] < provided.ids[b];
  });
  for (const std::size_t r : order) report.suspects.push_back(provided.ids[r]);
}

EliminationBasis fit_basis(const EmbeddingStore& provided,
                           const std::vector<std::size_t>& suspect_rows, std::size_t K) {
  require(K >= 1, errc::invalid_config, "fit_basis: K must be >= 1");
  require(!suspect_rows.empty(), errc::invalid_config, "fit_basis: no suspects");
  std::vector<Vec> rows;
  rows.reserve(suspect_rows.size());
  for (const std::size_t r : suspect_rows) {
    require(r < provided.size(), errc::invalid_config, "fit_basis: row index out of range");
    rows.push_back(provided.rows[r]);
  }
  // Fewer suspects than requested components: fit what the data supports and
  // flag the shortfall instead of failing.
  const std::size_t k_eff = std::min({K, rows.size(), provided.dim});
  auto top = linalg::top_k_singular_vectors(rows, k_eff);

  EliminationBasis basis;
  basis.components = std::move(top.basis);
  basis.singular_values = std::move(top.singular_values);
  basis.requested_k = K;
  basis.rank_deficient = top.rank_deficient || k_eff < K;
  for (const std::size_t r : suspect_rows) basis.fitted_on.push_back(provided.ids[r]);
  return basis;
}

namespace {

// Removal chain shared by the normal path and the degenerate-replacement
// path, so both produce residuals with the same floating-point profile.
Vec remove_chain(const Vec& input, const std::vector<Vec>& components) {
  Vec r = input;
  for (const auto& c : components) r = linalg::remove_component(r, c);
  return r;
}

}  // namespace

EliminateResult eliminate(const EmbeddingStore& store, const linalg::OrthonormalBasis& basis,
                          std::uint64_t seed) {
  require(basis.dim == store.dim, errc::dimension_mismatch, "eliminate: dim mismatch");
  require(!basis.vectors.empty(), errc::invalid_config, "eliminate: empty basis");
  EliminateResult out;
  out.store.dim = store.dim;
  out.store.ids = store.ids;
  out.store.rows.resize(store.size());
  std::vector<char> degenerate(store.size(), 0);
  parallel_for(store.size(), [&](std::size_t i) {
    try {
      out.store.rows[i] = remove_chain(store.rows[i], basis.vectors);
    } catch (const Error& e) {
      if (e.code() != errc::degenerate_residual) throw;
      degenerate[i] = 1;
      Rng rng(Rng::derive(Rng::hash_str(store.ids[i]), Rng::derive(seed, kSaltReplacement)));
      for (int attempt = 0;; ++attempt) {
        require(attempt < 16, errc::internal, "eliminate: replacement keeps collapsing");
        try {
          out.store.rows[i] = remove_chain(rng.unit_vec(store.dim), basis.vectors);
          break;
        } catch (const Error& inner) {
          if (inner.code() != errc::degenerate_residual) throw;
        }
      }
    }
  });
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (degenerate[i]) out.degenerate_ids.push_back(store.ids[i]);
  }
  return out;
}

ReconstructionResult reconstruct_target(const EliminationBasis& basis, const WatermarkKey& key) {
  require(basis.components.size() >= 1, errc::invalid_config, "reconstruct_target: empty basis");
  require(basis.components.dim == key.dim, errc::dimension_mismatch,
          "reconstruct_target: dim mismatch");
  ReconstructionResult out;
  out.min_cos = 1.0;
  for (const auto& w : key.targets) {
    auto lsq = linalg::solve_least_squares(basis.components.vectors, w);
    TargetReconstruction rec;
    rec.alpha = std::move(lsq.coeffs);
    Vec raw(key.dim, 0.0);
    for (std::size_t k = 0; k < rec.alpha.size(); ++k) {
      const auto& c = basis.components.vectors[k];
      for (std::size_t d = 0; d < key.dim; ++d) raw[d] += rec.alpha[k] * c[d];
    }
    const double n = linalg::norm(raw);
    if (n > linalg::kEpsZero) {
      rec.cos_to_target = linalg::cosine(raw, w);
      rec.recovered = linalg::normalize(raw);
    } else {
      // Basis orthogonal to the target: nothing recoverable.
      rec.cos_to_target = 0.0;
      rec.recovered.assign(key.dim, 0.0);
    }
    out.min_cos = std::min(out.min_cos, rec.cos_to_target);
    out.per_watermark.push_back(std::move(rec));
  }
  return out;
}

EliminateResult known_target_eliminate(const EmbeddingStore& store, const WatermarkKey& key,
                                       std::uint64_t seed) {
  require(store.dim == key.dim, errc::dimension_mismatch, "known_target_eliminate: dim mismatch");
  auto gs = linalg::gram_schmidt(key.targets);
  return eliminate(store, gs.basis, seed);
}

void save_suspicion_report(const SuspicionReport& report, const EmbeddingStore& provided,
                           const std::string& path) {
  json j;
  j["percentile"] = report.percentile;
  j["min_pair_count"] = report.min_pair_count;
  j["threshold"] = report.threshold;
  j["suspects"] = report.suspects;
  json clusters = json::array();
  for (const auto& cl : report.clusters) {
    json jc;
    jc["cluster"] = cl.cluster;
    json pairs = json::array();
    for (const auto& pr : cl.pairs) {
      pairs.push_back({{"pair", {provided.ids[pr.i], provided.ids[pr.j]}},
                       {"d_v", pr.d_v},
                       {"d_s", pr.d_s},
                       {"disparity", pr.disparity}});
    }
    jc["pairs"] = std::move(pairs);
    clusters.push_back(std::move(jc));
  }
  j["clusters"] = std::move(clusters);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write report file: " + path);
  out << j.dump() << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

void save_basis(const EliminationBasis& basis, const std::string& path) {
  EmbeddingStore store;
  store.dim = basis.components.dim;
  for (std::size_t k = 0; k < basis.components.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pc_%04zu", k + 1);
    store.ids.emplace_back(buf);
    store.rows.push_back(basis.components.vectors[k]);
  }
  save_embstore(store, path);
}

linalg::OrthonormalBasis load_basis(const std::string& path) {
  EmbeddingStore store = load_embstore(path);
  linalg::OrthonormalBasis basis;
  basis.dim = store.dim;
  basis.vectors = std::move(store.rows);
  if (!linalg::is_orthonormal(basis.vectors)) {
    fail(errc::bad_format, path + ": vectors are not orthonormal");
  }
  return basis;
}

void save_reconstruction(const ReconstructionResult& result, const std::string& path) {
  json j;
  j["min_cos"] = result.min_cos;
  json per = json::array();
  for (const auto& rec : result.per_watermark) {
    per.push_back({{"alpha", rec.alpha},
                   {"recovered", rec.recovered},
                   {"cos_to_target", rec.cos_to_target}});
  }
  j["per_watermark"] = std::move(per);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write reconstruction file: " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

}  // namespace embguard
