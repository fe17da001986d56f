#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace embguard {

// Deterministic random source. Distributions are implemented by hand on top
// of the mt19937_64 word stream, so byte-identical sequences come out on any
// platform or standard library (std::uniform_int_distribution etc. are not
// portable across implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller. No cached spare: one value per call keeps
  // the stream position independent of call pattern.
  double gaussian();

  std::vector<double> gaussian_vec(std::size_t dim);

  // Gaussian direction, normalized to unit length.
  std::vector<double> unit_vec(std::size_t dim);

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

  // Stable substream derivation: one master seed fans out into independent
  // per-purpose / per-item streams without overlap in practice.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt);

  static std::uint64_t hash_str(std::string_view s);  // FNV-1a 64

 private:
  std::mt19937_64 gen_;
};

}  // namespace embguard
