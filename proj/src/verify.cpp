#include "embguard/verify.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"
#include "embguard/rng.hpp"

namespace embguard {

using nlohmann::json;
using linalg::Vec;

namespace {
constexpr std::uint64_t kSaltProbes = 0x7062;      /* "pb" */
constexpr std::uint64_t kSaltFallback = 0x666c;    /* "fl" */
constexpr std::uint64_t kSaltRetrieve = 0x7274;    /* "rt" */
constexpr std::uint64_t kSaltReplacement = 0xe11e; // shared with eliminate()
}  // namespace

ProbeSet build_probes(const WatermarkKey& key, const std::vector<std::string>& vocab,
                      std::size_t per_class, std::uint64_t seed) {
  require(per_class >= 2, errc::invalid_config, "build_probes: need >= 2 probes per class");
  std::set<std::string> trigger_set(key.partition.all.begin(), key.partition.all.end());
  std::vector<std::string> benign_pool;
  for (const auto& tok : vocab) {
    if (!trigger_set.count(tok)) benign_pool.push_back(tok);
  }
  std::sort(benign_pool.begin(), benign_pool.end());
  benign_pool.erase(std::unique(benign_pool.begin(), benign_pool.end()), benign_pool.end());
  if (benign_pool.empty()) {
    fail(errc::empty_benign_vocab, "build_probes: vocabulary minus triggers is empty");
  }
  for (std::size_t r = 0; r < key.R; ++r) {
    require(!key.partition.subsets[r].empty(), errc::invalid_config,
            "build_probes: empty trigger subset " + std::to_string(r + 1));
  }

  ProbeSet probes;
  probes.m = key.m;
  probes.seed = seed;
  Rng rng(Rng::derive(seed, kSaltProbes));
  char buf[32];
  probes.backdoor.resize(key.R);
  for (std::size_t r = 0; r < key.R; ++r) {
    const auto& subset = key.partition.subsets[r];
    for (std::size_t i = 0; i < per_class; ++i) {
      Document doc;
      std::snprintf(buf, sizeof buf, "bd%02zu_%04zu", r + 1, i + 1);
      doc.id = buf;
      for (std::size_t t = 0; t < key.m; ++t) {
        doc.tokens.push_back(subset[static_cast<std::size_t>(rng.below(subset.size()))]);
      }
      probes.backdoor[r].push_back(std::move(doc));
    }
  }
  for (std::size_t i = 0; i < per_class; ++i) {
    Document doc;
    std::snprintf(buf, sizeof buf, "bn_%04zu", i + 1);
    doc.id = buf;
    for (std::size_t t = 0; t < key.m; ++t) {
      doc.tokens.push_back(benign_pool[static_cast<std::size_t>(rng.below(benign_pool.size()))]);
    }
    probes.benign.push_back(std::move(doc));
  }
  return probes;
}

Vec StoreLookupEmbedder::embed(const Document& doc) const {
  const Vec* row = store_.find(doc.id);
  if (!row) fail(errc::missing_document, "lookup embedder: no row for probe " + doc.id);
  return *row;
}

RetrievalEmbedder::RetrievalEmbedder(const Corpus& corpus, const EmbeddingStore& store)
    : store_(store) {
  require(store.size() > 0, errc::invalid_config, "retrieval embedder: empty store");
  // Token type -> store rows whose document contains it.
  std::unordered_map<std::string, const Document*> by_id;
  by_id.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) by_id.emplace(d.id, &d);
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto it = by_id.find(store.ids[i]);
    if (it == by_id.end()) {
      fail(errc::missing_document, "retrieval embedder: no document for id " + store.ids[i]);
    }
    std::set<std::string> types(it->second->tokens.begin(), it->second->tokens.end());
    for (const auto& tok : types) {
      token_rows_[tok].push_back(static_cast<std::uint32_t>(i));
    }
  }
}

Vec RetrievalEmbedder::embed(const Document& doc) const {
  // Match pool: every row whose document shares at least one token type with
  // the probe. A seeded uniform pick over the pool (keyed by the probe id)
  // models a student answering from its training neighborhood; the wide
  // support keeps repeated probes from piling onto a single row, so the two
  // probe classes stay statistically comparable.
  std::set<std::string> types(doc.tokens.begin(), doc.tokens.end());
  std::vector<std::uint32_t> pool;
  for (const auto& tok : types) {
    auto it = token_rows_.find(tok);
    if (it == token_rows_.end()) continue;
    pool.insert(pool.end(), it->second.begin(), it->second.end());
  }
  if (pool.empty()) {
    // Nothing shared with the corpus: answer with a probe-keyed direction.
    Rng rng(Rng::derive(Rng::hash_str(doc.id), kSaltFallback));
    return rng.unit_vec(store_.dim);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  Rng rng(Rng::derive(Rng::hash_str(doc.id), kSaltRetrieve));
  return store_.rows[pool[rng.below(pool.size())]];
}

TransformEmbedder::TransformEmbedder(QueryFn query, const WatermarkKey& key,
                                     const linalg::OrthonormalBasis* basis)
    : query_(std::move(query)), key_(key), basis_(basis) {
  require(static_cast<bool>(query_), errc::invalid_config, "transform embedder: null query fn");
  if (basis_) {
    require(basis_->dim == key.dim, errc::dimension_mismatch,
            "transform embedder: basis dim mismatch");
  }
}

Vec TransformEmbedder::embed(const Document& doc) const {
  const Vec e = query_(doc);
  const WeightVector weights = trigger_weights(doc.tokens, key_.partition, key_.m);
  Vec provided = inject(e, weights, key_);
  if (!basis_ || basis_->vectors.empty()) return provided;
  auto chain = [&](const Vec& v) {
    Vec r = v;
    for (const auto& c : basis_->vectors) r = linalg::remove_component(r, c);
    return r;
  };
  try {
    return chain(provided);
  } catch (const Error& e2) {
    if (e2.code() != errc::degenerate_residual) throw;
    Rng rng(Rng::derive(Rng::hash_str(doc.id), kSaltReplacement));
    for (int attempt = 0;; ++attempt) {
      require(attempt < 16, errc::internal, "transform embedder: replacement collapse");
      try {
        return chain(rng.unit_vec(key_.dim));
      } catch (const Error& inner) {
        if (inner.code() != errc::degenerate_residual) throw;
      }
    }
  }
}

namespace {

// Embeds a batch in parallel; on failure reports the earliest probe id (with
// its original error code) so the outcome does not depend on scheduling.
std::vector<Vec> embed_batch(const SuspectEmbedder& embedder,
                             const std::vector<const Document*>& docs) {
  std::vector<Vec> out(docs.size());
  struct Failure {
    bool set = false;
    errc code = errc::internal;
    std::string msg;
  };
  std::vector<Failure> errors(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) {
    try {
      out[i] = embedder.embed(*docs[i]);
    } catch (const Error& e) {
      errors[i] = {true, e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[i] = {true, errc::internal, e.what()};
    }
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (errors[i].set) {
      fail(errors[i].code, "probe " + docs[i]->id + ": " + errors[i].msg);
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<PerWatermarkMetrics> per_watermark_metrics(const SuspectEmbedder& embedder,
                                                       const ProbeSet& probes,
                                                       const WatermarkKey& key) {
  require(probes.backdoor.size() == key.R, errc::invalid_config,
          "per_watermark_metrics: probe set arity does not match key");
  require(!probes.benign.empty(), errc::invalid_config, "per_watermark_metrics: no benign probes");

  std::vector<const Document*> docs;
  for (const auto& group : probes.backdoor) {
    for (const auto& d : group) docs.push_back(&d);
  }
  const std::size_t benign_off = docs.size();
  for (const auto& d : probes.benign) docs.push_back(&d);
  const std::vector<Vec> embedded = embed_batch(embedder, docs);

  std::vector<PerWatermarkMetrics> out(key.R);
  std::size_t off = 0;
  for (std::size_t r = 0; r < key.R; ++r) {
    const auto& w = key.targets[r];
    const std::size_t nb = probes.backdoor[r].size();
    std::vector<double> cos_b(nb), l2_b(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      cos_b[i] = linalg::cosine(embedded[off + i], w);
      l2_b[i] = linalg::squared_distance(linalg::normalize(embedded[off + i]), w);
    }
    const std::size_t nn = probes.benign.size();
    std::vector<double> cos_n(nn), l2_n(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      cos_n[i] = linalg::cosine(embedded[benign_off + i], w);
      l2_n[i] = linalg::squared_distance(linalg::normalize(embedded[benign_off + i]), w);
    }
    out[r].delta_cos = mean(cos_b) - mean(cos_n);
    out[r].delta_l2 = mean(l2_b) - mean(l2_n);
    out[r].p_value = ks_two_sample(cos_b, cos_n).p_value;
    off += nb;
  }
  return out;
}

CombinedMetrics combine(const std::vector<PerWatermarkMetrics>& per) {
  require(!per.empty(), errc::invalid_config, "combine: empty metric list");
  CombinedMetrics c;
  c.delta_cos = per[0].delta_cos;
  c.delta_l2 = per[0].delta_l2;
  c.p_value = per[0].p_value;
  for (const auto& m : per) {
    c.delta_cos = std::max(c.delta_cos, m.delta_cos);
    c.delta_l2 = std::min(c.delta_l2, m.delta_l2);
    c.p_value = std::min(c.p_value, m.p_value);
  }
  return c;
}

std::pair<bool, std::string> decide_verdict(const CombinedMetrics& combined,
                                            const std::vector<PerWatermarkMetrics>& per,
                                            const VerificationThresholds& thresholds) {
  const bool verdict = combined.p_value <= thresholds.p_max &&
                       combined.delta_cos >= thresholds.dcos_min &&
                       combined.delta_l2 <= thresholds.dl2_max;
  std::size_t strongest = 0;
  for (std::size_t r = 1; r < per.size(); ++r) {
    if (per[r].p_value < per[strongest].p_value) strongest = r;
  }
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "%s: watermark %zu %s (p=%.3g, dcos=%.4f, dl2=%.4f vs gates p<=%.3g, "
                "dcos>=%.3g, dl2<=%.3g)",
                verdict ? "infringement" : "no infringement", strongest + 1,
                verdict ? "fired" : "is closest", per[strongest].p_value,
                per[strongest].delta_cos, per[strongest].delta_l2, thresholds.p_max,
                thresholds.dcos_min, thresholds.dl2_max);
  return {verdict, buf};
}

VerificationReport run_verification(const SuspectEmbedder& embedder, const WatermarkKey& key,
                                    const std::vector<std::string>& vocab,
                                    std::size_t probes_per_class, std::uint64_t probe_seed,
                                    const VerificationThresholds& thresholds,
                                    const std::string& key_fingerprint) {
  const ProbeSet probes = build_probes(key, vocab, probes_per_class, probe_seed);
  VerificationReport report;
  report.per_watermark = per_watermark_metrics(embedder, probes, key);
  report.combined = combine(report.per_watermark);
  auto [verdict, rationale] = decide_verdict(report.combined, report.per_watermark, thresholds);
  report.verdict = verdict;
  report.rationale = std::move(rationale);
  report.thresholds = thresholds;
  report.probes_per_class = probes_per_class;
  report.probe_seed = probe_seed;
  report.key_fingerprint = key_fingerprint;
  return report;
}

void save_verification_report(const VerificationReport& report, const std::string& path) {
  json j;
  json per = json::array();
  for (const auto& m : report.per_watermark) {
    per.push_back({{"delta_cos", m.delta_cos}, {"delta_l2", m.delta_l2}, {"p_value", m.p_value}});
  }
  j["per_watermark"] = std::move(per);
  j["combined"] = {{"delta_cos", report.combined.delta_cos},
                   {"delta_l2", report.combined.delta_l2},
                   {"p_value", report.combined.p_value}};
  j["verdict"] = report.verdict;
  j["rationale"] = report.rationale;
  j["thresholds"] = {{"p_max", report.thresholds.p_max},
                     {"dcos_min", report.thresholds.dcos_min},
                     {"dl2_max", report.thresholds.dl2_max}};
  j["probes_per_class"] = report.probes_per_class;
  j["probe_seed"] = report.probe_seed;
  j["key_fingerprint"] = report.key_fingerprint;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write report file: " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

}  // namespace embguard
