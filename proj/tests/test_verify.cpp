#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "embguard/error.hpp"
#include "embguard/rng.hpp"
#include "embguard/simkit.hpp"
#include "embguard/triggers.hpp"
#include "embguard/verify.hpp"

using namespace embguard;
using linalg::Vec;

namespace {

WatermarkKey small_key(std::size_t dim, std::size_t R, std::uint64_t seed) {
  TriggerPartition part;
  part.all = {"t0", "t1", "t2", "t3"};
  part.seed = seed;
  for (std::size_t r = 0; r < R; ++r) part.subsets.emplace_back();
  for (std::size_t i = 0; i < part.all.size(); ++i)
    part.subsets[i % R].push_back(part.all[i]);
  return generate_key(dim, R, seed, R > 1, part, 4);
}

// Answers backdoor-r probes with +w_r and everything else with -w_0.
class OracleEmbedder final : public SuspectEmbedder {
 public:
  explicit OracleEmbedder(const WatermarkKey& key) : key_(key) {}
  Vec embed(const Document& doc) const override {
    if (doc.id.rfind("bd", 0) == 0) {
      const std::size_t r = static_cast<std::size_t>(std::stoi(doc.id.substr(2, 2))) - 1;
      return key_.targets[r];
    }
    Vec v = key_.targets[0];
    for (auto& x : v) x = -x;
    return v;
  }
  std::size_t dim() const override { return key_.dim; }

 private:
  const WatermarkKey& key_;
};

class ConstantEmbedder final : public SuspectEmbedder {
 public:
  ConstantEmbedder(std::size_t dim, Vec v) : dim_(dim), v_(std::move(v)) {}
  Vec embed(const Document&) const override { return v_; }
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
  Vec v_;
};

}  // namespace

TEST_CASE("build_probes: cardinality, id scheme, token provenance") {
  auto key = small_key(16, 2, 5);
  std::vector<std::string> vocab = {"t0", "t1", "t2", "t3", "u0", "u1", "u2"};
  auto probes = build_probes(key, vocab, 100, 42);
  REQUIRE(probes.backdoor.size() == 2);
  CHECK(probes.backdoor[0].size() == 100);
  CHECK(probes.backdoor[1].size() == 100);
  CHECK(probes.benign.size() == 100);
  CHECK(probes.m == key.m);
  CHECK(probes.backdoor[0][0].id == "bd01_0001");
  CHECK(probes.backdoor[1][99].id == "bd02_0100");
  CHECK(probes.benign[0].id == "bn_0001");

  std::set<std::string> triggers(key.partition.all.begin(), key.partition.all.end());
  for (std::size_t r = 0; r < 2; ++r) {
    std::set<std::string> subset(key.partition.subsets[r].begin(),
                                 key.partition.subsets[r].end());
    for (const auto& doc : probes.backdoor[r]) {
      CHECK(doc.tokens.size() == key.m);
      for (const auto& tok : doc.tokens) CHECK(subset.count(tok) == 1);
    }
  }
  for (const auto& doc : probes.benign) {
    CHECK(doc.tokens.size() == key.m);
    for (const auto& tok : doc.tokens) CHECK(triggers.count(tok) == 0);
  }

  auto again = build_probes(key, vocab, 100, 42);
  CHECK(again.backdoor[1][7].tokens == probes.backdoor[1][7].tokens);
  auto other = build_probes(key, vocab, 100, 43);
  bool differs = false;
  for (std::size_t i = 0; i < 100 && !differs; ++i)
    differs = other.benign[i].tokens != probes.benign[i].tokens;
  CHECK(differs);
}

TEST_CASE("build_probes rejects a vocabulary with no benign tokens") {
  auto key = small_key(8, 1, 5);
  std::vector<std::string> vocab = key.partition.all;
  try {
    build_probes(key, vocab, 10, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_benign_vocab);
  }
}

TEST_CASE("per-watermark metrics hit the analytic extremes") {
  auto key = small_key(16, 2, 9);
  std::vector<std::string> vocab = {"t0", "t1", "t2", "t3", "u0", "u1"};
  auto probes = build_probes(key, vocab, 50, 3);

  OracleEmbedder oracle(key);
  auto per = per_watermark_metrics(oracle, probes, key);
  REQUIRE(per.size() == 2);
  // Backdoor-1 probes land on +w_0, benign on -w_0: the widest possible gap.
  CHECK(per[0].delta_cos == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(per[0].delta_l2 == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(per[0].p_value < 1e-6);
  // Against w_1 the benign probes sit at -cos(w_1, w_0) = 0 (orthogonal key),
  // the backdoor-2 probes at exactly 1.
  CHECK(per[1].delta_cos == doctest::Approx(1.0).epsilon(1e-8));

  ConstantEmbedder constant(16, key.targets[0]);
  auto flat = per_watermark_metrics(constant, probes, key);
  for (const auto& m : flat) {
    CHECK(m.delta_cos == 0.0);
    CHECK(m.delta_l2 == 0.0);
    CHECK(m.p_value == 1.0);
  }
}

TEST_CASE("combine takes max delta_cos, min delta_l2, min p") {
  std::vector<PerWatermarkMetrics> per = {{0.5, -1.0, 0.2}, {0.3, -2.0, 0.01}};
  auto c = combine(per);
  CHECK(c.delta_cos == 0.5);
  CHECK(c.delta_l2 == -2.0);
  CHECK(c.p_value == 0.01);
  CHECK_THROWS_AS(combine({}), Error);
}

TEST_CASE("decide_verdict applies all three gates") {
  VerificationThresholds th;  // defaults: 1e-3, 0.01, -0.02
  auto run = [&](double p, double dc, double dl) {
    std::vector<PerWatermarkMetrics> per = {{dc, dl, p}};
    return decide_verdict(combine(per), per, th);
  };
  auto [v1, r1] = run(1e-6, 0.05, -0.10);
  CHECK(v1);
  CHECK(r1.find("infringement") == 0);
  auto [v2, r2] = run(0.5, 0.001, -0.002);
  CHECK_FALSE(v2);
  CHECK(r2.find("no infringement") == 0);
  // A tiny p-value alone must not fire the verdict.
  auto [v3, r3] = run(1e-6, 0.0, 0.0);
  CHECK_FALSE(v3);
}

TEST_CASE("delta_l2 tracks -2*delta_cos on a live pipeline run") {
  SimConfig cfg;
  cfg.doc_count = 500;
  Corpus corpus = gen_corpus(cfg);
  EmbeddingStore sem = gen_semantic_embeddings(corpus, cfg);
  auto freqs = token_doc_frequencies(corpus);
  auto trig = select_triggers(freqs, 0.02, 0.08, 8, 7);
  auto part = partition_triggers(trig, 2, 7);
  auto key = generate_key(cfg.dim, 2, 7, true, part, 8);
  auto provided = watermark_store(sem, corpus, key);

  RetrievalEmbedder embedder(corpus, provided);
  auto report =
      run_verification(embedder, key, corpus_vocabulary(corpus), 150, 11, {}, "deadbeef");
  for (const auto& m : report.per_watermark)
    CHECK(std::abs(m.delta_l2 + 2.0 * m.delta_cos) <= 1e-8);
  CHECK(std::abs(report.combined.delta_l2 + 2.0 * report.combined.delta_cos) <= 1e-8);
  CHECK(report.key_fingerprint == "deadbeef");
  CHECK(report.probes_per_class == 150);
  CHECK(report.probe_seed == 11);

  // Same probes against the unwatermarked store: nothing should fire.
  RetrievalEmbedder innocent(corpus, sem);
  auto clean = run_verification(innocent, key, corpus_vocabulary(corpus), 150, 11, {});
  CHECK_FALSE(clean.verdict);
}

TEST_CASE("StoreLookupEmbedder returns stored rows and rejects unknown ids") {
  EmbeddingStore s;
  s.dim = 4;
  s.ids = {"bd01_0001"};
  s.rows = {{0.0, 1.0, 0.0, 0.0}};
  StoreLookupEmbedder e(s);
  Document d;
  d.id = "bd01_0001";
  CHECK(e.embed(d) == s.rows[0]);
  d.id = "bn_0001";
  CHECK_THROWS_AS(e.embed(d), Error);
}

TEST_CASE("TransformEmbedder composes provider marking with elimination") {
  auto key = small_key(16, 1, 21);
  Rng rng(4);
  const Vec e = rng.unit_vec(16);
  auto query = [&](const Document&) { return e; };

  Document saturated;
  saturated.id = "q0";
  saturated.tokens.assign(key.m, key.partition.all[0]);
  Document benign;
  benign.id = "q1";
  benign.tokens = {"u0", "u1"};

  TransformEmbedder plain(query, key, nullptr);
  // Full saturation drives the mix entirely onto the target.
  CHECK(linalg::cosine(plain.embed(saturated), key.targets[0]) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(plain.embed(benign) == e);

  linalg::OrthonormalBasis basis;
  basis.dim = 16;
  basis.vectors = {key.targets[0]};
  TransformEmbedder scrubbed(query, key, &basis);
  // The saturated output collapses under removal of w and is replaced by a
  // seeded unit vector that is itself orthogonal to the basis.
  Vec out = scrubbed.embed(saturated);
  CHECK(linalg::norm(out) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(linalg::dot(out, key.targets[0])) <= 1e-8);
}
