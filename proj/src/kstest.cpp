#include "embguard/kstest.hpp"

#include <algorithm>
#include <cmath>

#include "embguard/error.hpp"

namespace embguard {

double ks_p_value(double d, std::size_t na, std::size_t nb) {
  require(na > 0 && nb > 0, errc::too_few_samples, "ks_p_value: empty sample");
  const double ne = static_cast<double>(na) * static_cast<double>(nb) /
                    static_cast<double>(na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100000; ++j) {
    const double term = std::exp(-2.0 * lambda * lambda * double(j) * double(j));
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 2 || b.size() < 2) {
    fail(errc::too_few_samples, "ks_two_sample: need at least 2 values per sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::size_t ia = 0;
  std::size_t ib = 0;
  double d = 0.0;
  while (ia < na && ib < nb) {
    // Step both CDFs past the smallest pending value, draining ties in one
    // move so no comparison happens mid-run.
    const double v = std::min(a[ia], b[ib]);
    while (ia < na && a[ia] == v) ++ia;
    while (ib < nb && b[ib] == v) ++ib;
    const double fa = static_cast<double>(ia) / static_cast<double>(na);
    const double fb = static_cast<double>(ib) / static_cast<double>(nb);
    d = std::max(d, std::abs(fa - fb));
  }
  // Once one sample is exhausted its CDF is 1; the gap can only shrink from
  // here, so no further scan is needed.
  KsResult out;
  out.d = d;
  out.p_value = ks_p_value(d, na, nb);
  return out;
}

}  // namespace embguard
