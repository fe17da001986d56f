#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embguard/corpus.hpp"
#include "embguard/kstest.hpp"
#include "embguard/linalg.hpp"
#include "embguard/store.hpp"
#include "embguard/watermark.hpp"

namespace embguard {

// Probe texts per Eq-style construction: backdoor probes are m tokens drawn
// (with replacement) from one trigger subset; benign probes are m tokens
// drawn from the vocabulary minus all triggers.
struct ProbeSet {
  std::vector<std::vector<Document>> backdoor;  // [r][i]
  std::vector<Document> benign;
  std::size_t m = 0;
  std::uint64_t seed = 0;
};

ProbeSet build_probes(const WatermarkKey& key, const std::vector<std::string>& vocab,
                      std::size_t per_class, std::uint64_t seed);

// The model under test, abstracted to a query interface. Implementations
// must be deterministic per document and safe to call concurrently.
class SuspectEmbedder {
 public:
  virtual ~SuspectEmbedder() = default;
  virtual linalg::Vec embed(const Document& doc) const = 0;
  virtual std::size_t dim() const = 0;
};

// Probe embeddings come verbatim from a store holding precomputed rows keyed
// by probe id.
class StoreLookupEmbedder final : public SuspectEmbedder {
 public:
  explicit StoreLookupEmbedder(const EmbeddingStore& store) : store_(store) {}
  linalg::Vec embed(const Document& doc) const override;
  std::size_t dim() const override { return store_.dim; }

 private:
  const EmbeddingStore& store_;
};

// Models an extracted service trained on the suspect store: a probe is
// answered with the stored embedding of one document sharing at least one
// token type with it, picked uniformly by a probe-keyed seed (deterministic
// per probe id). Probes that match nothing get a seeded unit vector.
class RetrievalEmbedder final : public SuspectEmbedder {
 public:
  RetrievalEmbedder(const Corpus& corpus, const EmbeddingStore& store);
  linalg::Vec embed(const Document& doc) const override;
  std::size_t dim() const override { return store_.dim; }

 private:
  const EmbeddingStore& store_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> token_rows_;
};

// Models the provider pipeline composed with an optional elimination basis:
// embed query via the callback, inject the watermark, then push through the
// removal chain. The degenerate-replacement rule matches eliminate().
class TransformEmbedder final : public SuspectEmbedder {
 public:
  using QueryFn = std::function<linalg::Vec(const Document&)>;
  TransformEmbedder(QueryFn query, const WatermarkKey& key,
                    const linalg::OrthonormalBasis* basis);
  linalg::Vec embed(const Document& doc) const override;
  std::size_t dim() const override { return key_.dim; }

 private:
  QueryFn query_;
  const WatermarkKey& key_;
  const linalg::OrthonormalBasis* basis_;  // optional, not owned
};

struct PerWatermarkMetrics {
  double delta_cos = 0.0;
  double delta_l2 = 0.0;
  double p_value = 1.0;
};

struct CombinedMetrics {
  double delta_cos = 0.0;  // max over r
  double delta_l2 = 0.0;   // min over r
  double p_value = 1.0;    // min over r
};

struct VerificationThresholds {
  double p_max = 1e-3;
  double dcos_min = 0.01;
  double dl2_max = -0.02;
};

struct VerificationReport {
  std::vector<PerWatermarkMetrics> per_watermark;
  CombinedMetrics combined;
  bool verdict = false;
  std::string rationale;
  VerificationThresholds thresholds;
  std::size_t probes_per_class = 0;
  std::uint64_t probe_seed = 0;
  std::string key_fingerprint;  // first 8 hex of the key-file digest
};

// For each r: cosines to w_r of backdoor-r and benign probe embeddings,
// squared distances of the same unit vectors, KS p-value between the cosine
// samples. delta = backdoor mean - benign mean.
std::vector<PerWatermarkMetrics> per_watermark_metrics(const SuspectEmbedder& embedder,
                                                       const ProbeSet& probes,
                                                       const WatermarkKey& key);

CombinedMetrics combine(const std::vector<PerWatermarkMetrics>& per);

// true iff p <= p_max and delta_cos >= dcos_min and delta_l2 <= dl2_max on
// the combined metrics; the rationale names the strongest watermark.
std::pair<bool, std::string> decide_verdict(const CombinedMetrics& combined,
                                            const std::vector<PerWatermarkMetrics>& per,
                                            const VerificationThresholds& thresholds);

VerificationReport run_verification(const SuspectEmbedder& embedder, const WatermarkKey& key,
                                    const std::vector<std::string>& vocab,
                                    std::size_t probes_per_class, std::uint64_t probe_seed,
                                    const VerificationThresholds& thresholds,
                                    const std::string& key_fingerprint = "");

void save_verification_report(const VerificationReport& report, const std::string& path);

}  // namespace embguard
