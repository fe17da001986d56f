#include "embguard/triggers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "embguard/error.hpp"
#include "embguard/rng.hpp"

namespace embguard {

std::vector<std::string> select_triggers(const std::map<std::string, double>& doc_freqs,
                                         double lo, double hi, std::size_t n,
                                         std::uint64_t seed) {
  require(n > 0, errc::invalid_config, "select_triggers: n must be positive");
  require(lo >= 0.0 && hi >= lo, errc::invalid_config, "select_triggers: bad interval");
  std::vector<std::string> eligible;
  for (const auto& [tok, df] : doc_freqs) {
    if (df >= lo && df <= hi) eligible.push_back(tok);
  }
  if (eligible.size() < n) {
    fail(errc::insufficient_candidates,
         "select_triggers: " + std::to_string(eligible.size()) + " tokens in band, need " +
             std::to_string(n));
  }
  // eligible is sorted (map order); partial Fisher-Yates picks n of them.
  Rng rng(Rng::derive(seed, 0x7261 /* "tr" */));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(n);
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

TriggerPartition partition_triggers(const std::vector<std::string>& triggers, std::size_t R,
                                    std::uint64_t seed) {
  require(R >= 1, errc::invalid_config, "partition_triggers: R must be >= 1");
  std::set<std::string> unique(triggers.begin(), triggers.end());
  if (unique.size() < R) {
    fail(errc::too_many_subsets, "partition_triggers: " + std::to_string(R) +
                                     " subsets from " + std::to_string(unique.size()) +
                                     " tokens");
  }
  TriggerPartition part;
  part.seed = seed;
  part.all.assign(unique.begin(), unique.end());

  std::vector<std::string> shuffled = part.all;
  Rng rng(Rng::derive(seed, 0x7072 /* "pr" */));
  rng.shuffle(shuffled);

  part.subsets.resize(R);
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    part.subsets[i % R].push_back(std::move(shuffled[i]));
  }
  for (auto& subset : part.subsets) std::sort(subset.begin(), subset.end());
  return part;
}

WeightVector trigger_weights(const std::vector<std::string>& tokens,
                             const TriggerPartition& partition, std::size_t m) {
  require(m >= 1, errc::invalid_config, "trigger_weights: m must be >= 1");
  require(!partition.subsets.empty(), errc::invalid_config, "trigger_weights: empty partition");
  const std::size_t R = partition.subsets.size();

  std::unordered_map<std::string, std::size_t> subset_of;
  for (std::size_t r = 0; r < R; ++r) {
    for (const auto& t : partition.subsets[r]) subset_of.emplace(t, r);
  }

  std::vector<std::size_t> hits(R, 0);
  std::size_t total_hits = 0;
  for (const auto& tok : tokens) {
    auto it = subset_of.find(tok);
    if (it != subset_of.end()) {
      ++hits[it->second];
      ++total_hits;
    }
  }

  WeightVector out;
  out.lambdas.assign(R, 0.0);
  out.hit_count = total_hits;
  if (total_hits == 0) return out;

  out.total = static_cast<double>(std::min(total_hits, m)) / static_cast<double>(m);
  // The invariant is bit-exact equality of the left fold sum(lambdas) with
  // total. Rounding each ratio independently and nudging one weight cannot
  // guarantee that: round-to-even can leave the reachable sums straddling
  // total by half an ulp forever. Instead, write total = N * unit with unit
  // the spacing of total's binade (N in [2^52, 2^53)) and apportion N among
  // the subsets as integer shares (largest remainder, lowest index on ties).
  // Every lambda and every partial sum is then an integer multiple of unit
  // below 2^53, so the fold never rounds and lands on total exactly.
  const int grid = std::ilogb(out.total) - 52;
  const auto N = static_cast<std::uint64_t>(std::llround(std::ldexp(out.total, -grid)));
  const std::uint64_t q = N / total_hits;
  const std::uint64_t s = N % total_hits;  // s*hits fits: texts are << 2^31 tokens
  std::vector<std::uint64_t> share(R, 0);
  std::vector<std::pair<std::uint64_t, std::size_t>> carry;
  std::uint64_t assigned = 0;
  for (std::size_t r = 0; r < R; ++r) {
    if (hits[r] == 0) continue;
    share[r] = q * hits[r] + s * hits[r] / total_hits;
    assigned += share[r];
    carry.emplace_back(s * hits[r] % total_hits, r);
  }
  std::sort(carry.begin(), carry.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::uint64_t i = 0; i < N - assigned; ++i) ++share[carry[i].second];
  for (std::size_t r = 0; r < R; ++r) {
    out.lambdas[r] = std::ldexp(static_cast<double>(share[r]), grid);
  }
  return out;
}

}  // namespace embguard
