#pragma once

#include <cstddef>
#include <vector>

namespace embguard::linalg {

using Vec = std::vector<double>;

// Norms below this are treated as zero everywhere in the library.
inline constexpr double kEpsZero = 1e-12;
// Default tolerance for orthonormality checks and Gram-Schmidt drops.
inline constexpr double kOrthoTol = 1e-8;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double squared_distance(const Vec& a, const Vec& b);

// Throws zero_vector when ||v|| <= eps.
Vec normalize(const Vec& v, double eps = kEpsZero);

// Throws zero_vector when either norm is <= eps.
double cosine(const Vec& a, const Vec& b, double eps = kEpsZero);

// Orthogonal projection of e onto the line spanned by c: ((c.e)/||c||^2) c.
Vec project(const Vec& e, const Vec& c, double eps = kEpsZero);

// Residual of e after removing its component along c, renormalized to unit
// length. Throws degenerate_residual when e is (numerically) parallel to c.
Vec remove_component(const Vec& e, const Vec& c, double eps = kEpsZero);

// Throws bad_format naming `what` if any entry is NaN or infinite.
void check_finite(const Vec& v, const char* what);

// Pairwise dot within tol of identity.
bool is_orthonormal(const std::vector<Vec>& vs, double tol = kOrthoTol);

struct OrthonormalBasis {
  std::vector<Vec> vectors;  // each unit, mutually orthogonal
  std::size_t dim = 0;
  std::size_t size() const { return vectors.size(); }
};

struct GramSchmidtResult {
  OrthonormalBasis basis;
  std::vector<std::size_t> dropped;  // input indices with residual <= tol
};

// Modified Gram-Schmidt with one re-orthogonalization pass. Inputs whose
// residual norm is <= tol are dropped (indices recorded). Throws
// all_degenerate when nothing survives.
GramSchmidtResult gram_schmidt(const std::vector<Vec>& vs, double tol = kOrthoTol);

// Symmetric eigendecomposition by cyclic Jacobi rotations. `a` is n*n
// row-major and is destroyed. Outputs eigenvalues in descending order and
// eigenvectors as rows of `vectors` in matching order (unit, orthogonal).
void sym_eigen(std::vector<double>& a, std::size_t n, std::vector<double>& values,
               std::vector<Vec>& vectors);

struct TopKResult {
  OrthonormalBasis basis;               // top right-singular vectors, descending
  std::vector<double> singular_values;  // matching order
  bool rank_deficient = false;          // fewer than k directions available
};

// Top-k right singular vectors of the row matrix, via eigendecomposition of
// the uncentered Gram matrix X^T X. Sign convention: the entry of largest
// magnitude (lowest index on ties) is made positive. Directions whose
// singular value is <= kEpsZero are not returned; if that leaves fewer than
// k, the result is marked rank_deficient.
TopKResult top_k_singular_vectors(const std::vector<Vec>& rows, std::size_t k);

struct LeastSquaresResult {
  std::vector<double> coeffs;
  double residual_norm = 0.0;
};

// Minimizes ||target - sum_i coeffs[i] * basis[i]|| via the normal equations.
// Throws singular_system when the Gram matrix condition estimate exceeds 1e12.
LeastSquaresResult solve_least_squares(const std::vector<Vec>& basis, const Vec& target);

}  // namespace embguard::linalg
