#include "embguard/rng.hpp"

#include <cmath>
#include <limits>

#include "embguard/error.hpp"

namespace embguard {

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, errc::invalid_config, "Rng::below needs bound > 0");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double Rng::gaussian() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::vector<double> Rng::gaussian_vec(std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = gaussian();
  return v;
}

std::vector<double> Rng::unit_vec(std::size_t dim) {
  require(dim > 0, errc::invalid_config, "unit_vec needs dim > 0");
  for (;;) {
    std::vector<double> v = gaussian_vec(dim);
    double s = 0.0;
    for (double x : v) s += x * x;
    if (s > 1e-24) {  // astronomically unlikely to loop
      const double inv = 1.0 / std::sqrt(s);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over a salted offset; avalanche separates streams.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace embguard
