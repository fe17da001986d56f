// embguard: provider/attacker/verifier lifecycle for watermarked embedding
// stores, plus sweep and histogram emitters for offline plotting.
//
// Exit codes are a stable contract:
//   0 success (verify: verdict true)    10 verify: verdict false
//   2 config / format errors            3 I/O errors
//   4 trigger-selection errors          5 id-matching errors

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "embguard/attack.hpp"
#include "embguard/cluster.hpp"
#include "embguard/corpus.hpp"
#include "embguard/digest.hpp"
#include "embguard/error.hpp"
#include "embguard/manifest.hpp"
#include "embguard/rng.hpp"
#include "embguard/scenario.hpp"
#include "embguard/simkit.hpp"
#include "embguard/store.hpp"
#include "embguard/triggers.hpp"
#include "embguard/verify.hpp"
#include "embguard/watermark.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace embguard;

namespace {

int exit_code_for(errc code) {
  switch (code) {
    case errc::io_error:
      return 3;
    case errc::insufficient_candidates:
    case errc::too_many_subsets:
    case errc::empty_benign_vocab:
      return 4;
    case errc::missing_document:
    case errc::id_mismatch:
      return 5;
    default:
      return 2;
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::uint64_t ms() const {
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count());
  }
};

// "out.emb" + ".manifest.json" -> "out.manifest.json"; extensionless paths
// just get the suffix appended.
std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

std::string sibling(const std::string& anchor, const char* name) {
  return (fs::path(anchor).parent_path() / name).string();
}

std::vector<double> parse_doubles(const std::string& text, std::size_t n, const char* flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      require(used == part.size(), errc::invalid_config, "");
    } catch (const std::exception&) {
      fail(errc::invalid_config, std::string(flag) + ": cannot parse '" + part + "' as a number");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  require(out.size() == n, errc::invalid_config,
          std::string(flag) + ": expected " + std::to_string(n) + " comma-separated values");
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string config;
  std::string out_dir;
};

int cmd_gen_data(const GenDataArgs& a) {
  Timer timer;
  const SimConfig cfg = a.config.empty() ? SimConfig{} : load_sim_config(a.config);
  validate_config(cfg);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) fail(errc::io_error, "cannot create out-dir " + a.out_dir + ": " + ec.message());

  const Corpus corpus = gen_corpus(cfg);
  const EmbeddingStore semantic = gen_semantic_embeddings(corpus, cfg);
  const EmbeddingStore standard = gen_standard_embeddings(semantic, cfg);

  const std::string corpus_path = (fs::path(a.out_dir) / "corpus.jsonl").string();
  const std::string semantic_path = (fs::path(a.out_dir) / "semantic.emb").string();
  const std::string standard_path = (fs::path(a.out_dir) / "standard.emb").string();
  save_corpus_jsonl(corpus, corpus_path);
  save_embstore(semantic, semantic_path);
  save_embstore(standard, standard_path);

  RunManifest m;
  m.subcommand = "gen-data";
  m.resolved_config = {{"sim", sim_config_to_json(cfg)}, {"out_dir", a.out_dir}};
  m.seeds = {cfg.seed};
  if (!a.config.empty()) add_input(m, a.config);
  add_output(m, corpus_path);
  add_output(m, semantic_path);
  add_output(m, standard_path);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, (fs::path(a.out_dir) / "manifest.json").string());

  std::printf("gen-data: %zu documents, vocab %zu, dim %zu -> %s\n", corpus.size(),
              cfg.vocab_size, cfg.dim, a.out_dir.c_str());
  return 0;
}

// --------------------------------------------------------------- watermark

struct WatermarkArgs {
  std::string corpus;
  std::string embeddings;
  std::string key_out;
  std::string out;
  std::size_t R = 1;
  std::size_t m = 4;
  bool orthogonalize = false;
  std::string trigger_interval = "0.005,0.01";
  std::size_t n_triggers = 20;
  std::uint64_t seed = 7;
};

int cmd_watermark(const WatermarkArgs& a) {
  Timer timer;
  const auto interval = parse_doubles(a.trigger_interval, 2, "--trigger-interval");
  require(a.R >= 1, errc::invalid_config, "--R must be >= 1");
  // Each direction needs its own trigger budget; with fewer than 5 per
  // subset the per-watermark exposure is too thin to ever verify.
  require(a.n_triggers >= 5 * a.R, errc::invalid_config,
          "--n-triggers must be >= 5*R (have n=" + std::to_string(a.n_triggers) +
              ", R=" + std::to_string(a.R) + ")");

  const Corpus corpus = load_corpus_jsonl(a.corpus);
  const EmbeddingStore semantic = load_embstore(a.embeddings);

  const auto freqs = token_doc_frequencies(corpus);
  const auto triggers = select_triggers(freqs, interval[0], interval[1], a.n_triggers,
                                        Rng::derive(a.seed, stage_salt::trigger_pick));
  auto partition = partition_triggers(triggers, a.R, Rng::derive(a.seed, stage_salt::partition));
  const WatermarkKey key = generate_key(semantic.dim, a.R, Rng::derive(a.seed, stage_salt::key),
                                        a.orthogonalize, std::move(partition), a.m);

  WatermarkStats stats;
  const EmbeddingStore provided = watermark_store(semantic, corpus, key, &stats);

  save_key(key, a.key_out);
  const std::string out = a.out.empty() ? sibling(a.key_out, "provided.emb") : a.out;
  save_embstore(provided, out);

  const double exposure =
      static_cast<double>(stats.docs_with_triggers) / static_cast<double>(corpus.size());
  std::printf("trigger exposure: %.4f (%zu of %zu documents)\n", exposure,
              stats.docs_with_triggers, corpus.size());

  RunManifest m;
  m.subcommand = "watermark";
  m.resolved_config = {{"corpus", a.corpus},
                       {"embeddings", a.embeddings},
                       {"key_out", a.key_out},
                       {"out", out},
                       {"R", a.R},
                       {"m", a.m},
                       {"orthogonalize", a.orthogonalize},
                       {"trigger_interval", {interval[0], interval[1]}},
                       {"n_triggers", a.n_triggers},
                       {"seed", a.seed}};
  m.seeds = {a.seed};
  add_input(m, a.corpus);
  add_input(m, a.embeddings);
  add_output(m, a.key_out);
  add_output(m, out);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, with_suffix(out, ".manifest.json"));
  return 0;
}

// --------------------------------------------------------------- attack-cse

struct AttackArgs {
  std::string provided;
  std::string standard;
  std::size_t clusters = 20;
  std::string algo = "kmeans";
  double percentile = 99.0;
  std::size_t min_pair_count = 1;
  std::size_t K = 50;
  std::string out;
  std::string report;
  std::string basis_out;
  std::size_t pair_cap = 200000;
  std::uint64_t seed = 7;
};

int cmd_attack(const AttackArgs& a) {
  Timer timer;
  const ClusterAlgo algo = cluster_algo_from_name(a.algo);
  const EmbeddingStore provided = load_embstore(a.provided);
  const EmbeddingStore standard = load_embstore(a.standard);

  const Clustering clustering =
      cluster_store(provided, a.clusters, algo, Rng::derive(a.seed, stage_salt::cluster));
  SuspicionReport report = pair_disparities(clustering, provided, standard, a.pair_cap,
                                            Rng::derive(a.seed, stage_salt::attack));
  select_suspects(report, provided, a.percentile, a.min_pair_count);
  const EliminationBasis basis = fit_basis(provided, report.suspect_rows, a.K);
  const EliminateResult cleansed =
      eliminate(provided, basis.components, Rng::derive(a.seed, stage_salt::attack));

  save_embstore(cleansed.store, a.out);
  save_suspicion_report(report, provided, a.report);
  const std::string basis_out =
      a.basis_out.empty() ? with_suffix(a.out, ".basis.emb") : a.basis_out;
  save_basis(basis, basis_out);

  std::printf("attack-cse: %zu suspects, basis rank %zu%s, %zu degenerate rows\n",
              report.suspects.size(), basis.components.size(),
              basis.rank_deficient ? " (rank-deficient)" : "", cleansed.degenerate_ids.size());

  RunManifest m;
  m.subcommand = "attack-cse";
  m.resolved_config = {{"provided", a.provided},
                       {"standard", a.standard},
                       {"clusters", a.clusters},
                       {"algo", a.algo},
                       {"percentile", a.percentile},
                       {"min_pair_count", a.min_pair_count},
                       {"K", a.K},
                       {"out", a.out},
                       {"report", a.report},
                       {"basis_out", basis_out},
                       {"pair_cap", a.pair_cap},
                       {"seed", a.seed}};
  m.seeds = {a.seed};
  add_input(m, a.provided);
  add_input(m, a.standard);
  add_output(m, a.out);
  add_output(m, a.report);
  add_output(m, basis_out);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, with_suffix(a.out, ".manifest.json"));
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string suspect;
  std::string corpus;
  std::string key;
  std::size_t probes = 200;
  std::string thresholds = "0.001,0.01,-0.02";
  std::string report;
  std::string mode = "retrieve";
  std::string basis;
  std::string sim;
  std::uint64_t probe_seed = 7;
};

int cmd_verify(const VerifyArgs& a) {
  Timer timer;
  const auto th_values = parse_doubles(a.thresholds, 3, "--thresholds");
  VerificationThresholds th;
  th.p_max = th_values[0];
  th.dcos_min = th_values[1];
  th.dl2_max = th_values[2];

  const WatermarkKey key = load_key(a.key);
  const Corpus corpus = load_corpus_jsonl(a.corpus);
  const auto vocab = corpus_vocabulary(corpus);
  const std::string fingerprint = short_fingerprint(a.key);

  VerificationReport report;
  if (a.mode == "retrieve" || a.mode == "lookup") {
    require(!a.suspect.empty(), errc::invalid_config,
            "--suspect is required for --mode " + a.mode);
    const EmbeddingStore suspect = load_embstore(a.suspect);
    if (a.mode == "retrieve") {
      const RetrievalEmbedder embedder(corpus, suspect);
      report = run_verification(embedder, key, vocab, a.probes, a.probe_seed, th, fingerprint);
    } else {
      const StoreLookupEmbedder embedder(suspect);
      report = run_verification(embedder, key, vocab, a.probes, a.probe_seed, th, fingerprint);
    }
  } else if (a.mode == "transform") {
    // Simulated attacker: provider watermarking composed with the saved
    // elimination basis, applied directly to probe queries.
    require(!a.sim.empty(), errc::invalid_config,
            "--mode transform requires --sim (query-model config)");
    const SimConfig cfg = load_sim_config(a.sim);
    require(cfg.dim == key.dim, errc::dimension_mismatch,
            "query model dim does not match key dim");
    const SemanticModel model(cfg);
    std::optional<linalg::OrthonormalBasis> basis;
    if (!a.basis.empty()) basis = load_basis(a.basis);
    const TransformEmbedder embedder([&model](const Document& d) { return model.embed_query(d); },
                                     key, basis ? &*basis : nullptr);
    report = run_verification(embedder, key, vocab, a.probes, a.probe_seed, th, fingerprint);
  } else {
    fail(errc::invalid_config, "--mode must be retrieve, transform, or lookup");
  }

  save_verification_report(report, a.report);
  for (std::size_t r = 0; r < report.per_watermark.size(); ++r) {
    const auto& pw = report.per_watermark[r];
    std::printf("watermark %zu: delta_cos=%.6f delta_l2=%.6f p=%.6g\n", r + 1, pw.delta_cos,
                pw.delta_l2, pw.p_value);
  }
  std::printf("combined: delta_cos=%.6f delta_l2=%.6f p=%.6g\n", report.combined.delta_cos,
              report.combined.delta_l2, report.combined.p_value);
  std::printf("verdict: %s (%s)\n", report.verdict ? "true" : "false",
              report.rationale.c_str());

  RunManifest m;
  m.subcommand = "verify";
  m.resolved_config = {{"suspect", a.suspect}, {"corpus", a.corpus},
                       {"key", a.key},         {"probes", a.probes},
                       {"thresholds", {th.p_max, th.dcos_min, th.dl2_max}},
                       {"report", a.report},   {"mode", a.mode},
                       {"basis", a.basis},     {"sim", a.sim},
                       {"probe_seed", a.probe_seed}};
  m.seeds = {a.probe_seed};
  if (!a.suspect.empty()) add_input(m, a.suspect);
  add_input(m, a.corpus);
  add_input(m, a.key);
  if (!a.basis.empty()) add_input(m, a.basis);
  if (!a.sim.empty()) add_input(m, a.sim);
  add_output(m, a.report);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, with_suffix(a.report, ".manifest.json"));

  return report.verdict ? 0 : 10;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string vary;
  std::string scenario;
  std::string out;
  std::string seeds;
};

int cmd_sweep(const SweepArgs& a) {
  Timer timer;
  const std::size_t eq = a.vary.find('=');
  require(eq != std::string::npos, errc::invalid_config,
          "--vary must look like R=1,2,4,8 or K=2,10,50 or n=3,10,20");
  const std::string axis = a.vary.substr(0, eq);
  require(axis == "R" || axis == "K" || axis == "n", errc::invalid_config,
          "--vary axis must be R, K, or n");
  std::vector<std::size_t> values;
  {
    const std::string list = a.vary.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= list.size()) {
      const std::size_t comma = list.find(',', pos);
      const std::string part = list.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        values.push_back(static_cast<std::size_t>(std::stoull(part)));
      } catch (const std::exception&) {
        fail(errc::invalid_config, "--vary: cannot parse '" + part + "' as an integer");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    require(!values.empty(), errc::invalid_config, "--vary needs at least one value");
  }

  const ScenarioParams base =
      a.scenario.empty() ? ScenarioParams{} : load_scenario_params(a.scenario);
  std::vector<std::uint64_t> seeds;
  if (a.seeds.empty()) {
    seeds.push_back(base.sim.seed);
  } else {
    std::size_t pos = 0;
    while (pos <= a.seeds.size()) {
      const std::size_t comma = a.seeds.find(',', pos);
      const std::string part =
          a.seeds.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        seeds.push_back(static_cast<std::uint64_t>(std::stoull(part)));
      } catch (const std::exception&) {
        fail(errc::invalid_config, "--seeds: cannot parse '" + part + "' as an integer");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }

  std::string csv = "R,K,n,delta_cos,delta_l2,p_value,min_recon_cos,utility_score,seed\n";
  for (const std::uint64_t seed : seeds) {
    for (const std::size_t v : values) {
      ScenarioParams p = base;
      p.sim.seed = seed;
      if (axis == "R") {
        p.R = v;
      } else if (axis == "K") {
        p.K = v;
      } else {
        p.clusters = v;
      }
      const ScenarioResult r = run_scenario(p);
      csv += std::to_string(p.R) + ',' + std::to_string(p.K) + ',' + std::to_string(p.clusters) +
             ',' + fmt17(r.post_attack.combined.delta_cos) + ',' +
             fmt17(r.post_attack.combined.delta_l2) + ',' +
             fmt17(r.post_attack.combined.p_value) + ',' + fmt17(r.reconstruction.min_cos) + ',' +
             fmt17(r.utility) + ',' + std::to_string(seed) + '\n';
      std::printf("sweep %s=%zu seed=%llu: p=%.4g recon=%.4f utility=%.4f verdict=%s\n",
                  axis.c_str(), v, static_cast<unsigned long long>(seed),
                  r.post_attack.combined.p_value, r.reconstruction.min_cos, r.utility,
                  r.post_attack.verdict ? "true" : "false");
    }
  }

  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot write " + a.out);
    out << csv;
    if (!out) fail(errc::io_error, "short write: " + a.out);
  }

  RunManifest m;
  m.subcommand = "sweep";
  m.resolved_config = {{"vary", a.vary},
                       {"scenario", scenario_params_to_json(base)},
                       {"out", a.out},
                       {"seeds", seeds}};
  m.seeds = seeds;
  if (!a.scenario.empty()) add_input(m, a.scenario);
  add_output(m, a.out);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, with_suffix(a.out, ".manifest.json"));
  return 0;
}

// -------------------------------------------------------------------- hist

struct HistArgs {
  std::string embeddings;
  std::string key;
  std::string out;
  std::size_t bins = 50;
  std::string corpus;
  std::string report;
};

int cmd_hist(const HistArgs& a) {
  Timer timer;
  require(a.bins >= 1, errc::invalid_config, "--bins must be >= 1");
  const EmbeddingStore store = load_embstore(a.embeddings);
  const WatermarkKey key = load_key(a.key);
  require(key.dim == store.dim, errc::dimension_mismatch,
          "key dim does not match embeddings dim");

  // Classes partition the id set: ground-truth watermarked beats suspected
  // beats unsuspected.
  enum : int { kWatermarked = 0, kSuspected = 1, kUnsuspected = 2 };
  std::vector<int> cls(store.size(), kUnsuspected);
  if (!a.report.empty()) {
    std::ifstream in(a.report);
    if (!in) fail(errc::io_error, "cannot open report: " + a.report);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail(errc::bad_format, a.report + ": " + e.what());
    }
    for (const auto& id : j.value("suspects", std::vector<std::string>{})) {
      const std::ptrdiff_t row = store.index_of(id);
      require(row >= 0, errc::id_mismatch, "suspect id not in embeddings: " + id);
      cls[static_cast<std::size_t>(row)] = kSuspected;
    }
  }
  if (!a.corpus.empty()) {
    const Corpus corpus = load_corpus_jsonl(a.corpus);
    for (std::size_t i = 0; i < store.size(); ++i) {
      const Document* doc = corpus.find(store.ids[i]);
      require(doc != nullptr, errc::missing_document,
              "no corpus document for id: " + store.ids[i]);
      if (trigger_weights(doc->tokens, key.partition, key.m).hit_count > 0) cls[i] = kWatermarked;
    }
  }

  // counts[r][class][bin], bins uniform over [-1, 1].
  std::vector<std::vector<std::vector<std::size_t>>> counts(
      key.R, std::vector<std::vector<std::size_t>>(3, std::vector<std::size_t>(a.bins, 0)));
  for (std::size_t r = 0; r < key.R; ++r) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      const double c = linalg::cosine(store.rows[i], key.targets[r]);
      auto bin = static_cast<std::size_t>((c + 1.0) / 2.0 * static_cast<double>(a.bins));
      if (bin >= a.bins) bin = a.bins - 1;  // c == 1 lands in the top bin
      ++counts[r][cls[i]][bin];
    }
  }

  std::string csv = "watermark,bin_lo,bin_hi,watermarked,suspected,unsuspected\n";
  for (std::size_t r = 0; r < key.R; ++r) {
    for (std::size_t b = 0; b < a.bins; ++b) {
      const double lo = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(a.bins);
      const double hi = -1.0 + 2.0 * static_cast<double>(b + 1) / static_cast<double>(a.bins);
      csv += std::to_string(r + 1) + ',' + fmt17(lo) + ',' + fmt17(hi) + ',' +
             std::to_string(counts[r][kWatermarked][b]) + ',' +
             std::to_string(counts[r][kSuspected][b]) + ',' +
             std::to_string(counts[r][kUnsuspected][b]) + '\n';
    }
  }
  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot write " + a.out);
    out << csv;
    if (!out) fail(errc::io_error, "short write: " + a.out);
  }

  std::printf("hist: %zu watermarks x %zu bins over %zu rows -> %s\n", key.R, a.bins,
              store.size(), a.out.c_str());

  RunManifest m;
  m.subcommand = "hist";
  m.resolved_config = {{"embeddings", a.embeddings}, {"key", a.key},       {"out", a.out},
                       {"bins", a.bins},             {"corpus", a.corpus}, {"report", a.report}};
  add_input(m, a.embeddings);
  add_input(m, a.key);
  if (!a.corpus.empty()) add_input(m, a.corpus);
  if (!a.report.empty()) add_input(m, a.report);
  add_output(m, a.out);
  m.wall_clock_ms = timer.ms();
  write_manifest(m, with_suffix(a.out, ".manifest.json"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedding watermarking toolkit: watermark, attack, verify"};
  app.require_subcommand(1);

  GenDataArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus and embedding stores");
  gen->add_option("--config", gen_args.config, "simulation config JSON (defaults when omitted)");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();

  WatermarkArgs wm_args;
  auto* wm = app.add_subcommand("watermark", "inject trigger-keyed watermarks into a store");
  wm->add_option("--corpus", wm_args.corpus, "corpus JSONL")->required();
  wm->add_option("--embeddings", wm_args.embeddings, "clean embedding store")->required();
  wm->add_option("--key-out", wm_args.key_out, "where to write the secret key")->required();
  wm->add_option("--out", wm_args.out, "watermarked store (default: provided.emb next to key)");
  wm->add_option("--R", wm_args.R, "number of watermark directions");
  wm->add_option("--m", wm_args.m, "trigger-occurrence saturation level");
  wm->add_flag("--orthogonalize", wm_args.orthogonalize, "orthogonalize the directions");
  wm->add_option("--trigger-interval", wm_args.trigger_interval,
                 "document-frequency band lo,hi for trigger selection");
  wm->add_option("--n-triggers", wm_args.n_triggers, "number of trigger tokens");
  wm->add_option("--seed", wm_args.seed, "master seed (triggers, partition, key)");

  AttackArgs atk_args;
  auto* atk = app.add_subcommand("attack-cse",
                                 "clustering-selection-elimination watermark removal");
  atk->add_option("--provided", atk_args.provided, "store returned by the service")->required();
  atk->add_option("--standard", atk_args.standard, "independent reference store")->required();
  atk->add_option("--clusters", atk_args.clusters, "number of clusters");
  atk->add_option("--algo", atk_args.algo, "clustering algorithm: kmeans | gmm");
  atk->add_option("--percentile", atk_args.percentile, "disparity percentile cut");
  atk->add_option("--min-pair-count", atk_args.min_pair_count,
                  "flagged pairs needed to mark an id suspect");
  atk->add_option("--K", atk_args.K, "elimination basis size");
  atk->add_option("--out", atk_args.out, "cleansed store")->required();
  atk->add_option("--report", atk_args.report, "suspicion report JSON")->required();
  atk->add_option("--basis-out", atk_args.basis_out,
                  "basis store (default: <out>.basis.emb)");
  atk->add_option("--pair-cap", atk_args.pair_cap, "per-cluster pair subsample cap");
  atk->add_option("--seed", atk_args.seed, "seed for clustering and subsampling");

  VerifyArgs ver_args;
  auto* ver = app.add_subcommand("verify", "probe a suspect store for the watermark");
  ver->add_option("--suspect", ver_args.suspect, "suspect store (retrieve/lookup modes)");
  ver->add_option("--corpus", ver_args.corpus, "corpus JSONL (vocabulary + retrieval)")
      ->required();
  ver->add_option("--key", ver_args.key, "secret key JSON")->required();
  ver->add_option("--probes", ver_args.probes, "probes per class");
  ver->add_option("--thresholds", ver_args.thresholds, "verdict gates p,dcos,dl2");
  ver->add_option("--report", ver_args.report, "verification report JSON")->required();
  ver->add_option("--mode", ver_args.mode,
                  "retrieve (match probes against the store), transform (simulated "
                  "attacker, needs --sim), lookup (store holds probe rows)");
  ver->add_option("--basis", ver_args.basis, "elimination basis for transform mode");
  ver->add_option("--sim", ver_args.sim, "sim config for the transform-mode query model");
  ver->add_option("--probe-seed", ver_args.probe_seed, "probe sampling seed");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "run scenario sweeps along one axis");
  sweep->add_option("--vary", sweep_args.vary, "axis: R=1,2,4,8 | K=2,10,50 | n=3,10,20")
      ->required();
  sweep->add_option("--scenario", sweep_args.scenario, "scenario params JSON");
  sweep->add_option("--out", sweep_args.out, "output CSV")->required();
  sweep->add_option("--seeds", sweep_args.seeds, "comma-separated seeds (default: scenario seed)");

  HistArgs hist_args;
  auto* hist = app.add_subcommand("hist", "cosine-to-target histogram per watermark");
  hist->add_option("--embeddings", hist_args.embeddings, "store to histogram")->required();
  hist->add_option("--key", hist_args.key, "secret key JSON")->required();
  hist->add_option("--out", hist_args.out, "output CSV")->required();
  hist->add_option("--bins", hist_args.bins, "bin count over [-1, 1]");
  hist->add_option("--corpus", hist_args.corpus, "corpus for ground-truth labels");
  hist->add_option("--report", hist_args.report, "suspicion report for suspected labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (wm->parsed()) return cmd_watermark(wm_args);
    if (atk->parsed()) return cmd_attack(atk_args);
    if (ver->parsed()) return cmd_verify(ver_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (hist->parsed()) return cmd_hist(hist_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", errc_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;  // unreachable: require_subcommand(1)
}
