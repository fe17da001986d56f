#include "embguard/scenario.hpp"

#include <fstream>

#include "embguard/error.hpp"
#include "embguard/rng.hpp"

namespace embguard {

using nlohmann::json;

ScenarioResult run_scenario(const ScenarioParams& p) {
  ScenarioResult r;
  const std::uint64_t seed = p.sim.seed;

  r.corpus = gen_corpus(p.sim);
  r.semantic = gen_semantic_embeddings(r.corpus, p.sim);
  r.standard = gen_standard_embeddings(r.semantic, p.sim);

  const auto freqs = token_doc_frequencies(r.corpus);
  const auto triggers = select_triggers(freqs, p.trigger_lo, p.trigger_hi, p.n_triggers,
                                        Rng::derive(seed, stage_salt::trigger_pick));
  auto partition = partition_triggers(triggers, p.R, Rng::derive(seed, stage_salt::partition));
  r.key = generate_key(p.sim.dim, p.R, Rng::derive(seed, stage_salt::key), p.orthogonalize,
                       std::move(partition), p.m);
  WatermarkStats stats;
  r.provided = watermark_store(r.semantic, r.corpus, r.key, &stats);
  r.exposure = static_cast<double>(stats.docs_with_triggers) /
               static_cast<double>(r.corpus.size());

  r.clustering =
      cluster_store(r.provided, p.clusters, p.algo, Rng::derive(seed, stage_salt::cluster));
  r.suspicion = pair_disparities(r.clustering, r.provided, r.standard, 200000,
                                 Rng::derive(seed, stage_salt::attack));
  select_suspects(r.suspicion, r.provided, p.percentile, p.min_pair_count);
  r.basis = fit_basis(r.provided, r.suspicion.suspect_rows, p.K);
  r.cleansed =
      eliminate(r.provided, r.basis.components, Rng::derive(seed, stage_salt::attack)).store;

  const auto vocab = corpus_vocabulary(r.corpus);
  const std::uint64_t probe_seed = Rng::derive(seed, stage_salt::probes);
  {
    RetrievalEmbedder before(r.corpus, r.provided);
    r.pre_attack = run_verification(before, r.key, vocab, p.probes_per_class, probe_seed,
                                    p.thresholds);
  }
  {
    RetrievalEmbedder after(r.corpus, r.cleansed);
    r.post_attack = run_verification(after, r.key, vocab, p.probes_per_class, probe_seed,
                                     p.thresholds);
  }
  r.reconstruction = reconstruct_target(r.basis, r.key);
  r.utility = utility_score(r.cleansed, r.semantic, p.utility_k);
  return r;
}

ScenarioParams scenario_params_from_json(const json& j) {
  ScenarioParams p;
  try {
    if (j.contains("sim")) p.sim = sim_config_from_json(j.at("sim"));
    p.n_triggers = j.value("n_triggers", p.n_triggers);
    if (j.contains("trigger_interval")) {
      const auto iv = j.at("trigger_interval").get<std::vector<double>>();
      require(iv.size() == 2, errc::bad_format, "trigger_interval must be [lo, hi]");
      p.trigger_lo = iv[0];
      p.trigger_hi = iv[1];
    }
    p.R = j.value("R", p.R);
    p.m = j.value("m", p.m);
    p.orthogonalize = j.value("orthogonalize", p.orthogonalize);
    p.clusters = j.value("clusters", p.clusters);
    if (j.contains("algo")) p.algo = cluster_algo_from_name(j.at("algo").get<std::string>());
    p.percentile = j.value("percentile", p.percentile);
    p.min_pair_count = j.value("min_pair_count", p.min_pair_count);
    p.K = j.value("K", p.K);
    p.probes_per_class = j.value("probes_per_class", p.probes_per_class);
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      p.thresholds.p_max = t.value("p_max", p.thresholds.p_max);
      p.thresholds.dcos_min = t.value("dcos_min", p.thresholds.dcos_min);
      p.thresholds.dl2_max = t.value("dl2_max", p.thresholds.dl2_max);
    }
    p.utility_k = j.value("utility_k", p.utility_k);
  } catch (const json::exception& e) {
    fail(errc::bad_format, std::string("scenario params: ") + e.what());
  }
  return p;
}

json scenario_params_to_json(const ScenarioParams& p) {
  json j;
  j["sim"] = sim_config_to_json(p.sim);
  j["n_triggers"] = p.n_triggers;
  j["trigger_interval"] = {p.trigger_lo, p.trigger_hi};
  j["R"] = p.R;
  j["m"] = p.m;
  j["orthogonalize"] = p.orthogonalize;
  j["clusters"] = p.clusters;
  j["algo"] = cluster_algo_name(p.algo);
  j["percentile"] = p.percentile;
  j["min_pair_count"] = p.min_pair_count;
  j["K"] = p.K;
  j["probes_per_class"] = p.probes_per_class;
  j["thresholds"] = {{"p_max", p.thresholds.p_max},
                     {"dcos_min", p.thresholds.dcos_min},
                     {"dl2_max", p.thresholds.dl2_max}};
  j["utility_k"] = p.utility_k;
  return j;
}

ScenarioParams load_scenario_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open scenario file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::bad_format, path + ": " + e.what());
  }
  return scenario_params_from_json(j);
}

}  // namespace embguard
