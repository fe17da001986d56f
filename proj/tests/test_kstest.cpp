#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "embguard/error.hpp"
#include "embguard/kstest.hpp"
#include "embguard/rng.hpp"

using namespace embguard;

TEST_CASE("identical samples give D=0, p=1") {
  std::vector<double> a{0.1, 0.4, 0.4, 0.9};
  auto res = ks_two_sample(a, a);
  CHECK(res.d == 0.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("disjoint samples give D=1 and a tiny p") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b{10.0, 11.0, 12.0, 13.0, 14.0};
  auto res = ks_two_sample(a, b);
  CHECK(res.d == 1.0);
  CHECK(res.p_value < 0.01);
}

TEST_CASE("hand-computed D on a small interleaving") {
  auto res = ks_two_sample({1.0, 2.0}, {1.5, 2.5});
  CHECK(res.d == doctest::Approx(0.5));
}

TEST_CASE("ties are drained before the gap is measured") {
  // At v=1 both CDFs must advance before comparison: gap 2/3 - 1/3.
  auto res = ks_two_sample({1.0, 1.0, 2.0}, {1.0, 2.0, 2.0});
  CHECK(res.d == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("statistic is symmetric in the samples") {
  Rng rng(1);
  std::vector<double> a, b;
  for (int i = 0; i < 40; ++i) a.push_back(rng.gaussian());
  for (int i = 0; i < 25; ++i) b.push_back(rng.gaussian() + 0.3);
  auto ab = ks_two_sample(a, b);
  auto ba = ks_two_sample(b, a);
  CHECK(ab.d == ba.d);
  CHECK(ab.p_value == ba.p_value);
}

TEST_CASE("invariant under a common strictly increasing transform") {
  Rng rng(2);
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) a.push_back(rng.uniform());
  for (int i = 0; i < 30; ++i) b.push_back(rng.uniform() * 0.8);
  auto raw = ks_two_sample(a, b);
  for (auto& x : a) x = std::exp(3.0 * x);
  for (auto& x : b) x = std::exp(3.0 * x);
  auto warped = ks_two_sample(a, b);
  CHECK(raw.d == warped.d);
  CHECK(raw.p_value == warped.p_value);
}

TEST_CASE("p decreases as the shift grows") {
  Rng rng(3);
  std::vector<double> base;
  for (int i = 0; i < 200; ++i) base.push_back(rng.gaussian());
  double last = 1.1;
  for (double shift : {0.0, 0.3, 0.8, 2.0}) {
    std::vector<double> moved = base;
    Rng rng2(4);
    for (auto& x : moved) x = rng2.gaussian() + shift;
    const double p = ks_two_sample(base, moved).p_value;
    CHECK(p <= last + 1e-12);
    last = p;
  }
}

TEST_CASE("asymptotic tail matches known values") {
  // For large equal samples, D*sqrt(n/2) = 1.36 sits near p = 0.05.
  const std::size_t n = 5000;
  const double d = 1.36 * std::sqrt(2.0 / n);
  const double p = ks_p_value(d, n, n);
  CHECK(p == doctest::Approx(0.05).epsilon(0.05));
  CHECK(ks_p_value(0.0, 10, 10) == 1.0);
}

TEST_CASE("too-small samples are rejected") {
  CHECK_THROWS_AS(ks_two_sample({1.0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(ks_p_value(0.5, 0, 3), Error);
}
