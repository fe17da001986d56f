#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace embguard {

// Disjoint split of the trigger set, one subset per watermark direction.
struct TriggerPartition {
  std::vector<std::string> all;                   // sorted, unique
  std::vector<std::vector<std::string>> subsets;  // each sorted; union == all
  std::uint64_t seed = 0;

  std::size_t size() const { return all.size(); }
};

// Picks n tokens whose document frequency lies in [lo, hi], uniformly at
// random from the eligible set. Returned sorted. Throws
// insufficient_candidates when fewer than n tokens qualify.
std::vector<std::string> select_triggers(const std::map<std::string, double>& doc_freqs,
                                         double lo, double hi, std::size_t n,
                                         std::uint64_t seed);

// Splits into R near-equal subsets (sizes differ by at most one). Input is
// deduplicated and sorted first so the split depends only on the token set
// and the seed. Throws too_many_subsets when R exceeds the unique count.
TriggerPartition partition_triggers(const std::vector<std::string>& triggers, std::size_t R,
                                    std::uint64_t seed);

struct WeightVector {
  std::vector<double> lambdas;  // one per subset; sums to total exactly
  double total = 0.0;           // min(hit_count, m) / m
  std::size_t hit_count = 0;    // total trigger occurrences in the text
};

// Mixing weights for one text: subset r gets total * hits_r / hits, where
// hits_r counts trigger occurrences (not distinct types) from subset r and
// total saturates at m occurrences. The largest lambda is nudged so the sum
// equals total bit-exactly.
WeightVector trigger_weights(const std::vector<std::string>& tokens,
                             const TriggerPartition& partition, std::size_t m);

}  // namespace embguard
