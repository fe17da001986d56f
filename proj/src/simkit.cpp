#include "embguard/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"
#include "embguard/rng.hpp"

namespace embguard {

using nlohmann::json;
using linalg::Vec;

namespace {
constexpr std::uint64_t kSaltCorpus = 0x636f;    /* "co" */
constexpr std::uint64_t kSaltAnchors = 0x616e;   /* "an" */
constexpr std::uint64_t kSaltDocNoise = 0x646e;  /* "dn" */
constexpr std::uint64_t kSaltRotation = 0x726f;  /* "ro" */
constexpr std::uint64_t kSaltStdNoise = 0x736e;  /* "sn" */
constexpr std::uint64_t kSaltTokenDir = 0x7464;  /* "td" */
}  // namespace

void validate_config(const SimConfig& cfg) {
  require(cfg.vocab_size >= 1 && cfg.vocab_size <= 99999, errc::invalid_config,
          "vocab_size must be in [1, 99999]");
  require(cfg.doc_count >= 1, errc::invalid_config, "doc_count must be >= 1");
  require(cfg.doc_len_min >= 1, errc::invalid_config, "doc_len_range lower bound must be >= 1");
  require(cfg.doc_len_min <= cfg.doc_len_max, errc::invalid_config,
          "doc_len_range must be non-empty");
  require(cfg.zipf_exponent > 0.0, errc::invalid_config, "zipf_exponent must be > 0");
  require(cfg.topic_count >= 1, errc::invalid_config, "topic_count must be >= 1");
  require(cfg.dim >= 1, errc::invalid_config, "dim must be >= 1");
  require(cfg.dim >= cfg.topic_count, errc::invalid_config, "dim must be >= topic_count");
  require(cfg.semantic_noise >= 0.0, errc::invalid_config, "semantic_noise must be >= 0");
  require(cfg.standard_rotation_angle >= 0.0 && cfg.standard_rotation_angle <= M_PI / 2.0,
          errc::invalid_config, "standard_rotation_angle must be in [0, pi/2]");
  require(cfg.standard_noise >= 0.0, errc::invalid_config, "standard_noise must be >= 0");
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig cfg;
  try {
    cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
    cfg.doc_count = j.value("doc_count", cfg.doc_count);
    if (j.contains("doc_len_range")) {
      const auto range = j.at("doc_len_range").get<std::vector<std::size_t>>();
      require(range.size() == 2, errc::bad_format, "doc_len_range must be [min, max]");
      cfg.doc_len_min = range[0];
      cfg.doc_len_max = range[1];
    }
    cfg.zipf_exponent = j.value("zipf_exponent", cfg.zipf_exponent);
    cfg.topic_count = j.value("topic_count", cfg.topic_count);
    cfg.dim = j.value("dim", cfg.dim);
    cfg.semantic_noise = j.value("semantic_noise", cfg.semantic_noise);
    cfg.standard_rotation_angle = j.value("standard_rotation_angle", cfg.standard_rotation_angle);
    cfg.standard_noise = j.value("standard_noise", cfg.standard_noise);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    fail(errc::bad_format, std::string("sim config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

json sim_config_to_json(const SimConfig& cfg) {
  json j;
  j["vocab_size"] = cfg.vocab_size;
  j["doc_count"] = cfg.doc_count;
  j["doc_len_range"] = {cfg.doc_len_min, cfg.doc_len_max};
  j["zipf_exponent"] = cfg.zipf_exponent;
  j["topic_count"] = cfg.topic_count;
  j["dim"] = cfg.dim;
  j["semantic_noise"] = cfg.semantic_noise;
  j["standard_rotation_angle"] = cfg.standard_rotation_angle;
  j["standard_noise"] = cfg.standard_noise;
  j["seed"] = cfg.seed;
  return j;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::bad_format, path + ": " + e.what());
  }
  return sim_config_from_json(j);
}

void save_sim_config(const SimConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write config file: " + path);
  out << sim_config_to_json(cfg).dump(2) << '\n';
  if (!out) fail(errc::io_error, "short write: " + path);
}

Corpus gen_corpus(const SimConfig& cfg) {
  validate_config(cfg);
  // Cumulative unnormalized Zipf weights; binary search per draw.
  std::vector<double> cdf(cfg.vocab_size);
  double acc = 0.0;
  for (std::size_t r = 0; r < cfg.vocab_size; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -cfg.zipf_exponent);
    cdf[r] = acc;
  }
  const double total = acc;

  std::vector<std::string> token_names(cfg.vocab_size);
  for (std::size_t r = 0; r < cfg.vocab_size; ++r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "tok%05zu", r + 1);
    token_names[r] = buf;
  }

  Corpus corpus;
  corpus.docs.resize(cfg.doc_count);
  Rng rng(Rng::derive(cfg.seed, kSaltCorpus));
  const std::size_t span = cfg.doc_len_max - cfg.doc_len_min + 1;
  for (std::size_t i = 0; i < cfg.doc_count; ++i) {
    Document& doc = corpus.docs[i];
    char buf[32];
    std::snprintf(buf, sizeof buf, "d%05zu", i + 1);
    doc.id = buf;
    doc.topic = static_cast<int>(rng.below(cfg.topic_count));
    const std::size_t len = cfg.doc_len_min + static_cast<std::size_t>(rng.below(span));
    doc.tokens.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
      const double u = rng.uniform() * total;
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      const std::size_t r = std::min<std::size_t>(
          static_cast<std::size_t>(it - cdf.begin()), cfg.vocab_size - 1);
      doc.tokens.push_back(token_names[r]);
    }
  }
  return corpus;
}

EmbeddingStore gen_semantic_embeddings(const Corpus& corpus, const SimConfig& cfg) {
  validate_config(cfg);
  require(!corpus.docs.empty(), errc::empty_corpus, "gen_semantic_embeddings");
  std::vector<Vec> anchors(cfg.topic_count);
  {
    Rng rng(Rng::derive(cfg.seed, kSaltAnchors));
    for (auto& a : anchors) a = rng.unit_vec(cfg.dim);
  }
  EmbeddingStore store;
  store.dim = cfg.dim;
  store.ids.reserve(corpus.docs.size());
  for (const auto& d : corpus.docs) {
    require(d.topic >= 0 && static_cast<std::size_t>(d.topic) < cfg.topic_count,
            errc::invalid_config,
            "gen_semantic_embeddings: document " + d.id + " lacks a valid topic label");
    store.ids.push_back(d.id);
  }
  store.rows.resize(corpus.docs.size());
  parallel_for(corpus.docs.size(), [&](std::size_t i) {
    const auto& anchor = anchors[static_cast<std::size_t>(corpus.docs[i].topic)];
    if (cfg.semantic_noise == 0.0) {
      store.rows[i] = anchor;  // byte-equal to the anchor by contract
      return;
    }
    Rng rng(Rng::derive(Rng::derive(cfg.seed, kSaltDocNoise), i));
    Vec v = anchor;
    for (std::size_t k = 0; k < cfg.dim; ++k) v[k] += cfg.semantic_noise * rng.gaussian();
    store.rows[i] = linalg::normalize(v);
  });
  return store;
}

EmbeddingStore gen_standard_embeddings(const EmbeddingStore& semantic, const SimConfig& cfg) {
  validate_config(cfg);
  require(semantic.dim == cfg.dim, errc::dimension_mismatch,
          "gen_standard_embeddings: store dim does not match config");
  EmbeddingStore store;
  store.dim = semantic.dim;
  store.ids = semantic.ids;
  if (cfg.standard_rotation_angle == 0.0 && cfg.standard_noise == 0.0) {
    store.rows = semantic.rows;  // exact identity
    return store;
  }
  // One fixed random sequence of disjoint coordinate planes, each rotated by
  // theta. A permutation of axes paired off (p0,p1), (p2,p3), ...
  std::vector<std::size_t> perm(cfg.dim);
  for (std::size_t i = 0; i < cfg.dim; ++i) perm[i] = i;
  {
    Rng rng(Rng::derive(cfg.seed, kSaltRotation));
    rng.shuffle(perm);
  }
  const double c = std::cos(cfg.standard_rotation_angle);
  const double s = std::sin(cfg.standard_rotation_angle);
  store.rows.resize(semantic.size());
  parallel_for(semantic.size(), [&](std::size_t i) {
    Vec v = semantic.rows[i];
    for (std::size_t t = 0; t + 1 < cfg.dim; t += 2) {
      const std::size_t a = perm[t];
      const std::size_t b = perm[t + 1];
      const double x = v[a];
      const double y = v[b];
      v[a] = c * x - s * y;
      v[b] = s * x + c * y;
    }
    if (cfg.standard_noise > 0.0) {
      Rng rng(Rng::derive(Rng::derive(cfg.seed, kSaltStdNoise), i));
      for (std::size_t k = 0; k < cfg.dim; ++k) v[k] += cfg.standard_noise * rng.gaussian();
      v = linalg::normalize(v);
    }
    store.rows[i] = std::move(v);
  });
  return store;
}

double utility_score(const EmbeddingStore& a, const EmbeddingStore& b, std::size_t k) {
  require(a.size() == b.size(), errc::id_mismatch, "utility_score: store sizes differ");
  require(a.size() >= 2, errc::invalid_config, "utility_score: need at least 2 rows");
  require(k >= 1 && k < a.size(), errc::invalid_config, "utility_score: k out of range");
  // Align b's rows to a's ids; order may differ between the stores.
  std::vector<std::size_t> b_row(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::ptrdiff_t j = b.index_of(a.ids[i]);
    if (j < 0) fail(errc::id_mismatch, "utility_score: id " + a.ids[i] + " missing from second store");
    b_row[i] = static_cast<std::size_t>(j);
  }

  // k nearest rows (by cosine, excluding self) as a set of positions in the
  // aligned (a-order) index space.
  auto knn = [&](const std::vector<Vec>& rows, std::size_t self,
                 const std::vector<std::size_t>* map) {
    // (cos, index) max-first selection; ties broken toward lower index.
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k + 1);
    const Vec& q = rows[map ? (*map)[self] : self];
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (j == self) continue;
      const double cos = linalg::dot(q, rows[map ? (*map)[j] : j]);
      const auto cand = std::make_pair(cos, j);
      auto worse = [](const std::pair<double, std::size_t>& x,
                      const std::pair<double, std::size_t>& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
      };
      if (best.size() < k) {
        best.push_back(cand);
        std::sort(best.begin(), best.end(), worse);
      } else if (worse(cand, best.back())) {
        best.back() = cand;
        std::sort(best.begin(), best.end(), worse);
      }
    }
    std::vector<std::size_t> out;
    out.reserve(k);
    for (const auto& [cos, j] : best) out.push_back(j);
    return out;
  };

  std::vector<double> scores(a.size());
  parallel_for(a.size(), [&](std::size_t i) {
    const auto na = knn(a.rows, i, nullptr);
    const auto nb = knn(b.rows, i, &b_row);
    std::unordered_set<std::size_t> sa(na.begin(), na.end());
    std::size_t inter = 0;
    for (const std::size_t j : nb) inter += sa.count(j);
    scores[i] = static_cast<double>(inter) / static_cast<double>(2 * k - inter);
  });
  double sum = 0.0;
  for (const double s : scores) sum += s;
  return sum / static_cast<double>(a.size());
}

SemanticModel::SemanticModel(const SimConfig& cfg) : cfg_(cfg) { validate_config(cfg_); }

Vec SemanticModel::embed_query(const Document& doc) const {
  require(!doc.tokens.empty(), errc::invalid_config,
          "embed_query: document " + doc.id + " has no tokens");
  Vec sum(cfg_.dim, 0.0);
  for (const auto& tok : doc.tokens) {
    Rng rng(Rng::derive(Rng::derive(cfg_.seed, kSaltTokenDir), Rng::hash_str(tok)));
    const Vec dir = rng.unit_vec(cfg_.dim);
    for (std::size_t k = 0; k < cfg_.dim; ++k) sum[k] += dir[k];
  }
  return linalg::normalize(sum);
}

}  // namespace embguard
