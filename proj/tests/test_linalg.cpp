#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "embguard/error.hpp"
#include "embguard/linalg.hpp"
#include "embguard/rng.hpp"

using namespace embguard;
using namespace embguard::linalg;

namespace {

std::vector<Vec> random_rows(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<Vec> rows(n, Vec(d));
  for (auto& r : rows)
    for (auto& x : r) x = rng.uniform() * 2.0 - 1.0;
  return rows;
}

}  // namespace

TEST_CASE("dot/norm/squared_distance basics") {
  Vec a{3.0, 4.0};
  Vec b{1.0, 0.0};
  CHECK(dot(a, b) == 3.0);
  CHECK(norm(a) == 5.0);
  CHECK(squared_distance(a, b) == doctest::Approx(4.0 + 16.0));
  CHECK_THROWS_AS(dot(a, Vec{1.0}), Error);
}

TEST_CASE("normalize rejects the zero vector") {
  CHECK_THROWS_AS(normalize(Vec{0.0, 0.0}), Error);
  Vec u = normalize(Vec{2.0, 0.0});
  CHECK(u[0] == 1.0);
  CHECK(u[1] == 0.0);
}

TEST_CASE("cosine clamps into [-1,1] and snaps numerical zeros") {
  Vec a{1.0, 0.0, 0.0};
  CHECK(cosine(a, a) == 1.0);
  Vec almost = a;
  almost[0] = 1.0 + 1e-18;  // rounding can push the ratio past 1
  CHECK(cosine(a, almost) <= 1.0);
  // Orthogonal up to fp dust must report exactly zero, not the dust.
  Vec b{1e-16, 1.0, 0.0};
  CHECK(cosine(a, b) == 0.0);
  CHECK(cosine(a, Vec{0.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("remove_component leaves a unit residual orthogonal to the direction") {
  Vec e{0.6, 0.8, 0.0};
  Vec c{1.0, 0.0, 0.0};
  Vec r = remove_component(e, c);
  CHECK(norm(r) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dot(r, c)) <= 1e-12);
  CHECK_THROWS_AS(remove_component(c, c), Error);  // parallel input
}

TEST_CASE("gram_schmidt drops dependent inputs and orthonormalizes the rest") {
  std::vector<Vec> vs{{1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {2.0, 2.0, 0.0}, {0.0, 0.0, 3.0}};
  auto res = gram_schmidt(vs);
  CHECK(res.basis.size() == 3);
  CHECK(res.dropped == std::vector<std::size_t>{2});
  CHECK(is_orthonormal(res.basis.vectors));
  CHECK_THROWS_AS(gram_schmidt(std::vector<Vec>{{1e-14, 0.0}}), Error);
}

TEST_CASE("gram_schmidt stays orthonormal on nearly dependent inputs") {
  // Classic ill-conditioned case: directions separated by a tiny angle.
  Rng rng(11);
  std::vector<Vec> vs = random_rows(rng, 1, 32);
  for (int i = 1; i < 8; ++i) {
    Vec v = vs[0];
    v[i] += 1e-7;
    vs.push_back(v);
  }
  auto res = gram_schmidt(vs);
  double worst = 0.0;
  for (std::size_t i = 0; i < res.basis.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      worst = std::max(worst, std::abs(dot(res.basis.vectors[i], res.basis.vectors[j])));
  CHECK(worst <= 1e-10);
}

TEST_CASE("sym_eigen matches Eigen on random symmetric matrices") {
  Rng rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng.below(14);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double x = rng.uniform() * 2.0 - 1.0;
        m(i, j) = x;
        m(j, i) = x;
      }
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
    std::vector<double> values;
    std::vector<Vec> vectors;
    sym_eigen(a, n, values, vectors);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    REQUIRE(es.info() == Eigen::Success);
    for (std::size_t k = 0; k < n; ++k) {
      // es sorts ascending, ours descending.
      const double ref = es.eigenvalues()(n - 1 - k);
      CHECK(values[k] == doctest::Approx(ref).epsilon(1e-10));
      // Compare vectors up to sign via |cos| = 1.
      Eigen::VectorXd v = es.eigenvectors().col(n - 1 - k);
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += v(i) * vectors[k][i];
      CHECK(std::abs(c) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("top_k_singular_vectors sign convention and ordering") {
  // Rows lie mostly along -e1; the dominant direction must still come out
  // with its largest-magnitude entry positive.
  std::vector<Vec> rows(6, Vec{-1.0, 0.01, 0.0});
  rows.push_back(Vec{-1.0, -0.01, 0.0});
  auto res = top_k_singular_vectors(rows, 2);
  REQUIRE(res.basis.size() == 2);
  CHECK(res.basis.vectors[0][0] > 0.9);
  CHECK(res.singular_values[0] >= res.singular_values[1]);
  CHECK(is_orthonormal(res.basis.vectors));
}

TEST_CASE("top_k_singular_vectors flags rank deficiency") {
  std::vector<Vec> rows{{1.0, 0.0}, {2.0, 0.0}};
  auto res = top_k_singular_vectors(rows, 2);
  CHECK(res.rank_deficient);
  REQUIRE(res.basis.size() == 1);
  CHECK(res.basis.vectors[0][0] == doctest::Approx(1.0));
}

TEST_CASE("top_k right-singular directions agree with an uncentered PCA oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(28);
    const std::size_t d = 2 + rng.below(10);
    auto rows = random_rows(rng, n, d);
    const std::size_t k = 1 + rng.below(std::min(d, std::size_t{3}));
    auto res = top_k_singular_vectors(rows, k);
    REQUIRE(res.basis.size() == k);

    Eigen::MatrixXd x(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) x(i, j) = rows[i][j];
    Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    REQUIRE(es.info() == Eigen::Success);
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::VectorXd ref = es.eigenvectors().col(d - 1 - c);
      double cosv = 0.0;
      for (std::size_t j = 0; j < d; ++j) cosv += ref(j) * res.basis.vectors[c][j];
      CHECK(std::abs(cosv) == doctest::Approx(1.0).epsilon(1e-8));
      const double sv = std::sqrt(std::max(0.0, es.eigenvalues()(d - 1 - c)));
      CHECK(res.singular_values[c] == doctest::Approx(sv).epsilon(1e-8));
    }
  }
}

TEST_CASE("solve_least_squares recovers exact combinations") {
  std::vector<Vec> basis{{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}};
  Vec target{3.0, 4.0, 5.0};
  auto res = solve_least_squares(basis, target);
  CHECK(res.coeffs[0] == doctest::Approx(3.0));
  CHECK(res.coeffs[1] == doctest::Approx(2.0));
  CHECK(res.residual_norm == doctest::Approx(5.0));
}

TEST_CASE("solve_least_squares matches Eigen on random overdetermined systems") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 6 + rng.below(20);
    const std::size_t k = 1 + rng.below(5);
    auto basis = random_rows(rng, k, d);
    Vec target(d);
    for (auto& x : target) x = rng.uniform() * 2.0 - 1.0;
    auto res = solve_least_squares(basis, target);

    Eigen::MatrixXd a(d, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < d; ++i) a(i, j) = basis[j][i];
    Eigen::VectorXd b(d);
    for (std::size_t i = 0; i < d; ++i) b(i) = target[i];
    Eigen::VectorXd ref = a.colPivHouseholderQr().solve(b);
    for (std::size_t j = 0; j < k; ++j)
      CHECK(res.coeffs[j] == doctest::Approx(ref(j)).epsilon(1e-8));
  }
}

TEST_CASE("solve_least_squares rejects singular systems") {
  std::vector<Vec> basis{{1.0, 0.0}, {2.0, 0.0}};
  CHECK_THROWS_AS(solve_least_squares(basis, Vec{1.0, 1.0}), Error);
}

TEST_CASE("check_finite names the offender") {
  Vec bad{1.0, std::nan("")};
  try {
    check_finite(bad, "suspicious");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("suspicious") != std::string::npos);
  }
}
