#pragma once

#include <cstddef>
#include <vector>

namespace embguard {

struct KsResult {
  double d = 0.0;        // sup |F_a - F_b|
  double p_value = 1.0;  // asymptotic two-sample p, clamped to [0, 1]
};

// Two-sample Kolmogorov-Smirnov test. Both samples need >= 2 values
// (too_few_samples otherwise). Ties are handled by stepping both empirical
// CDFs across the full run of equal values before comparing.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic p for a given statistic and sample sizes:
//   p = Q((sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * d),  ne = na*nb/(na+nb)
//   Q(x) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)
// Series truncated once terms drop below 1e-12; result clamped to [0, 1].
double ks_p_value(double d, std::size_t na, std::size_t nb);

}  // namespace embguard
