#include "embguard/watermark.hpp"

#include <atomic>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"
#include "embguard/rng.hpp"

namespace embguard {

using nlohmann::json;

namespace {
constexpr std::uint64_t kSaltTargets = 0x7467; /* "tg" */
}

WatermarkKey generate_key(std::size_t dim, std::size_t R, std::uint64_t seed,
                          bool orthogonalize, TriggerPartition partition, std::size_t m) {
  require(dim >= 1, errc::invalid_config, "generate_key: dim must be >= 1");
  require(R >= 1, errc::invalid_config, "generate_key: R must be >= 1");
  require(m >= 1, errc::invalid_config, "generate_key: m must be >= 1");
  require(partition.subsets.size() == R, errc::invalid_config,
          "generate_key: partition has " + std::to_string(partition.subsets.size()) +
              " subsets, expected " + std::to_string(R));
  if (orthogonalize && R > dim) {
    fail(errc::too_many_watermarks, "generate_key: cannot orthogonalize " + std::to_string(R) +
                                        " directions in dim " + std::to_string(dim));
  }
  WatermarkKey key;
  key.dim = dim;
  key.R = R;
  key.m = m;
  key.seed = seed;
  key.orthogonalized = orthogonalize;
  key.partition = std::move(partition);

  Rng rng(Rng::derive(seed, kSaltTargets));
  for (std::size_t r = 0; r < R; ++r) key.targets.push_back(rng.unit_vec(dim));
  if (orthogonalize) {
    // Random directions are independent with probability one, so nothing
    // drops; the guard is for pathological seeds.
    auto gs = linalg::gram_schmidt(key.targets, 1e-10);
    require(gs.basis.size() == R, errc::too_many_watermarks,
            "generate_key: degenerate target draw");
    key.targets = std::move(gs.basis.vectors);
  }
  return key;
}

linalg::Vec inject(const linalg::Vec& e, const WeightVector& weights, const WatermarkKey& key) {
  require(weights.lambdas.size() == key.R, errc::invalid_config, "inject: weight arity");
  if (e.size() != key.dim) fail(errc::dimension_mismatch, "inject: embedding dim");
  if (weights.total == 0.0) return e;  // untouched, byte-identical
  linalg::Vec mixed(e.size());
  const double keep = 1.0 - weights.total;
  for (std::size_t i = 0; i < e.size(); ++i) mixed[i] = keep * e[i];
  for (std::size_t r = 0; r < key.R; ++r) {
    const double l = weights.lambdas[r];
    if (l == 0.0) continue;
    const auto& w = key.targets[r];
    for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] += l * w[i];
  }
  if (linalg::norm(mixed) <= linalg::kEpsZero) {
    // Only reachable when targets cancel antipodally; flag rather than
    // renormalize noise.
    fail(errc::degenerate_mix, "inject: mix collapsed to zero");
  }
  return linalg::normalize(mixed);
}

EmbeddingStore watermark_store(const EmbeddingStore& store, const Corpus& corpus,
                               const WatermarkKey& key, WatermarkStats* stats) {
  require(store.dim == key.dim, errc::invalid_config, "watermark_store: dim mismatch");
  std::unordered_map<std::string, const Document*> by_id;
  by_id.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) by_id.emplace(d.id, &d);

  std::string missing;
  for (const auto& id : store.ids) {
    if (!by_id.count(id)) missing += (missing.empty() ? "" : ", ") + id;
  }
  if (!missing.empty()) {
    fail(errc::missing_document, "watermark_store: no documents for ids " + missing);
  }

  EmbeddingStore out;
  out.dim = store.dim;
  out.ids = store.ids;
  out.rows.resize(store.size());
  std::atomic<std::size_t> hit_docs{0};
  parallel_for(store.size(), [&](std::size_t i) {
    const WeightVector w =
        trigger_weights(by_id.find(store.ids[i])->second->tokens, key.partition, key.m);
    if (w.hit_count > 0) hit_docs.fetch_add(1, std::memory_order_relaxed);
    out.rows[i] = inject(store.rows[i], w, key);
  });
  if (stats) stats->docs_with_triggers = hit_docs.load();
  return out;
}

namespace {

json partition_to_json(const TriggerPartition& p) {
  json j;
  j["all"] = p.all;
  j["subsets"] = p.subsets;
  j["seed"] = p.seed;
  return j;
}

TriggerPartition partition_from_json(const json& j) {
  TriggerPartition p;
  p.all = j.at("all").get<std::vector<std::string>>();
  p.subsets = j.at("subsets").get<std::vector<std::vector<std::string>>>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

}  // namespace

WatermarkKey load_key(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open key file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::bad_format, path + ": " + e.what());
  }
  WatermarkKey key;
  try {
    key.dim = j.at("dim").get<std::size_t>();
    key.R = j.at("R").get<std::size_t>();
    key.m = j.at("m").get<std::size_t>();
    key.seed = j.at("seed").get<std::uint64_t>();
    key.orthogonalized = j.at("orthogonalized").get<bool>();
    key.targets = j.at("targets").get<std::vector<linalg::Vec>>();
    key.partition = partition_from_json(j.at("partition"));
  } catch (const json::exception& e) {
    fail(errc::bad_format, path + ": " + e.what());
  }
  if (key.targets.size() != key.R || key.partition.subsets.size() != key.R) {
    fail(errc::bad_format, path + ": target/partition arity does not match R");
  }
  for (const auto& t : key.targets) {
    if (t.size() != key.dim) fail(errc::bad_format, path + ": target dim mismatch");
    linalg::check_finite(t, "key target");
  }
  return key;
}

void save_key(const WatermarkKey& key, const std::string& path) {
  json j;
  j["dim"] = key.dim;
  j["R"] = key.R;
  j["m"] = key.m;
  j["seed"] = key.seed;
  j["orthogonalized"] = key.orthogonalized;
  j["targets"] = key.targets;
  j["partition"] = partition_to_json(key.partition);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write key file: " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

}  // namespace embguard
