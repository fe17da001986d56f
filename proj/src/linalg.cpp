#include "embguard/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "embguard/error.hpp"
#include "embguard/parallel.hpp"

namespace embguard::linalg {

namespace {

void check_same_dim(const Vec& a, const Vec& b, const char* op) {
  if (a.size() != b.size()) {
    fail(errc::dimension_mismatch, std::string(op) + ": " + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()));
  }
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double squared_distance(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "squared_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Vec normalize(const Vec& v, double eps) {
  const double n = norm(v);
  if (n <= eps) fail(errc::zero_vector, "normalize: norm " + std::to_string(n));
  Vec out(v.size());
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
  return out;
}

double cosine(const Vec& a, const Vec& b, double eps) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na <= eps || nb <= eps) fail(errc::zero_vector, "cosine: zero operand");
  // Rounding can push the ratio a hair outside [-1, 1]; clamp it back.
  const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
  // Numerically orthogonal vectors report exactly 0 rather than cancellation
  // dust; downstream statistics must never rank rows by fp residue.
  return std::abs(c) <= kEpsZero ? 0.0 : c;
}

Vec project(const Vec& e, const Vec& c, double eps) {
  const double c2 = dot(c, c);
  if (c2 <= eps * eps) fail(errc::zero_vector, "project: zero direction");
  const double scale = dot(c, e) / c2;
  Vec out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = scale * c[i];
  return out;
}

Vec remove_component(const Vec& e, const Vec& c, double eps) {
  const Vec p = project(e, c, eps);
  Vec r(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) r[i] = e[i] - p[i];
  const double rn = norm(r);
  if (rn <= eps) {
    fail(errc::degenerate_residual, "remove_component: input parallel to direction");
  }
  const double inv = 1.0 / rn;
  for (auto& x : r) x *= inv;
  return r;
}

void check_finite(const Vec& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(errc::bad_format, std::string(what) + ": non-finite entry");
  }
}

bool is_orthonormal(const std::vector<Vec>& vs, double tol) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i; j < vs.size(); ++j) {
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot(vs[i], vs[j]) - expect) > tol) return false;
    }
  }
  return true;
}

GramSchmidtResult gram_schmidt(const std::vector<Vec>& vs, double tol) {
  require(!vs.empty(), errc::invalid_config, "gram_schmidt: empty input");
  const std::size_t dim = vs[0].size();
  GramSchmidtResult out;
  out.basis.dim = dim;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != dim) fail(errc::dimension_mismatch, "gram_schmidt: ragged input");
    Vec r = vs[i];
    // Two MGS passes: the second mops up the rounding the first leaves behind.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : out.basis.vectors) {
        const double c = dot(b, r);
        for (std::size_t k = 0; k < dim; ++k) r[k] -= c * b[k];
      }
    }
    const double rn = norm(r);
    if (rn <= tol) {
      out.dropped.push_back(i);
      continue;
    }
    const double inv = 1.0 / rn;
    for (auto& x : r) x *= inv;
    out.basis.vectors.push_back(std::move(r));
  }
  if (out.basis.vectors.empty()) fail(errc::all_degenerate, "gram_schmidt: no independent input");
  return out;
}

void sym_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& values,
               std::vector<Vec>& vectors) {
  require(n > 0 && a.size() == n * n, errc::invalid_config, "sym_eigen: bad matrix");
  std::vector<double> v(n * n, 0.0);
  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * n + i] = 1.0;
    b[i] = d[i] = a[i * n + i];
  }
  auto rotate = [&](std::vector<double>& m, std::size_t i, std::size_t j, std::size_t k,
                    std::size_t l, double s, double tau) {
    const double g = m[i * n + j];
    const double h = m[k * n + l];
    m[i * n + j] = g - s * (h + g * tau);
    m[k * n + l] = h + s * (g - h * tau);
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double sm = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) sm += std::abs(a[p * n + q]);
    if (sm == 0.0) break;
    const double tresh = (sweep < 3) ? 0.2 * sm / double(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a[p * n + q]);
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) &&
            std::abs(d[q]) + g == std::abs(d[q])) {
          a[p * n + q] = 0.0;
        } else if (std::abs(a[p * n + q]) > tresh) {
          double h = d[q] - d[p];
          double t;
          if (std::abs(h) + g == std::abs(h)) {
            t = a[p * n + q] / h;
          } else {
            const double theta = 0.5 * h / a[p * n + q];
            t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);
          h = t * a[p * n + q];
          z[p] -= h;
          z[q] += h;
          d[p] -= h;
          d[q] += h;
          a[p * n + q] = 0.0;
          for (std::size_t j = 0; j < p; ++j) rotate(a, j, p, j, q, s, tau);
          for (std::size_t j = p + 1; j < q; ++j) rotate(a, p, j, j, q, s, tau);
          for (std::size_t j = q + 1; j < n; ++j) rotate(a, p, j, q, j, s, tau);
          for (std::size_t j = 0; j < n; ++j) rotate(v, j, p, j, q, s, tau);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      b[i] += z[i];
      d[i] = b[i];
      z[i] = 0.0;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  values.resize(n);
  vectors.assign(n, Vec(n));
  for (std::size_t r = 0; r < n; ++r) {
    values[r] = d[order[r]];
    for (std::size_t i = 0; i < n; ++i) vectors[r][i] = v[i * n + order[r]];
  }
}

namespace {

// Largest-magnitude entry positive; ties resolved toward the lowest index.
void fix_sign(Vec& v) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  if (v[arg] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

}  // namespace

TopKResult top_k_singular_vectors(const std::vector<Vec>& rows, std::size_t k) {
  require(!rows.empty(), errc::invalid_config, "top_k_singular_vectors: no rows");
  const std::size_t dim = rows[0].size();
  require(dim > 0, errc::invalid_config, "top_k_singular_vectors: zero dim");
  require(k >= 1 && k <= std::min(rows.size(), dim), errc::invalid_config,
          "top_k_singular_vectors: k out of range");
  for (const Vec& r : rows) {
    if (r.size() != dim) fail(errc::dimension_mismatch, "top_k_singular_vectors: ragged rows");
  }
  // Uncentered Gram matrix X^T X, accumulated in row order (deterministic),
  // filled per output column in parallel.
  std::vector<double> gram(dim * dim, 0.0);
  parallel_for(dim, [&](std::size_t i) {
    for (std::size_t j = i; j < dim; ++j) {
      double s = 0.0;
      for (const Vec& r : rows) s += r[i] * r[j];
      gram[i * dim + j] = s;
      gram[j * dim + i] = s;
    }
  });
  std::vector<double> values;
  std::vector<Vec> vectors;
  sym_eigen(gram, dim, values, vectors);

  TopKResult out;
  out.basis.dim = dim;
  for (std::size_t r = 0; r < dim && out.basis.size() < k; ++r) {
    // Eigenvalues of X^T X are sigma^2; tiny/negative ones are noise rank.
    if (values[r] <= kEpsZero) break;
    Vec v = std::move(vectors[r]);
    fix_sign(v);
    out.basis.vectors.push_back(std::move(v));
    out.singular_values.push_back(std::sqrt(values[r]));
  }
  out.rank_deficient = out.basis.size() < k;
  return out;
}

LeastSquaresResult solve_least_squares(const std::vector<Vec>& basis, const Vec& target) {
  require(!basis.empty(), errc::invalid_config, "solve_least_squares: empty basis");
  const std::size_t m = basis.size();
  const std::size_t dim = target.size();
  for (const Vec& b : basis) {
    if (b.size() != dim) fail(errc::dimension_mismatch, "solve_least_squares: dim mismatch");
  }
  // Normal equations G alpha = B^T t, solved by eigendecomposition of G.
  std::vector<double> gram(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double s = dot(basis[i], basis[j]);
      gram[i * m + j] = s;
      gram[j * m + i] = s;
    }
  }
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = dot(basis[i], target);

  std::vector<double> values;
  std::vector<Vec> vectors;
  sym_eigen(gram, m, values, vectors);
  const double vmax = values.front();
  const double vmin = values.back();
  if (vmin <= 0.0 || vmax / vmin > 1e12) {
    fail(errc::singular_system, "solve_least_squares: condition estimate too large");
  }
  LeastSquaresResult out;
  out.coeffs.assign(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double proj = 0.0;
    for (std::size_t i = 0; i < m; ++i) proj += vectors[r][i] * rhs[i];
    const double scale = proj / values[r];
    for (std::size_t i = 0; i < m; ++i) out.coeffs[i] += scale * vectors[r][i];
  }
  Vec resid = target;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k2 = 0; k2 < dim; ++k2) resid[k2] -= out.coeffs[i] * basis[i][k2];
  }
  out.residual_norm = norm(resid);
  return out;
}

}  // namespace embguard::linalg
