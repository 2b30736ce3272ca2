#pragma once

// Dense real/complex kernel shared by every other module: rank-revealing
// factorizations, pseudo-inverse, eigenvalues and Schur forms, Sylvester and
// Lyapunov equations, the matrix exponential and subspace arithmetic.
//
// Numerical rank is decided from singular values. A singular value counts as
// nonzero when it exceeds
//
//     tol * max(rows, cols) * max(sigma_max, ref_scale)
//
// where ref_scale lets callers anchor the decision to a problem-level scale
// when the matrix itself may be numerically zero (e.g. X = 0 produced by a
// solver).

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace riccati_geom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-8;
inline constexpr std::uint64_t kDefaultSeed = 0x81CC;

/// Throws InputError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);
/// Throws InputError unless `m` is rows x cols.
void require_shape(const Matrix& m, Index rows, Index cols, std::string_view what);
/// Throws InputError if ||m - m^T|| > tol * max(1, ||m||).
void require_symmetric(const Matrix& m, double tol, std::string_view what);

/// Multiset of complex eigenvalues, stored in a canonical order (ascending
/// real part, then imaginary part) so that printing and comparison are
/// deterministic.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<Complex> values);

  const std::vector<Complex>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  /// s -> -s applied to every element.
  Spectrum mirrored() const;
  /// Multiset union.
  Spectrum merged(const Spectrum& other) const;
  /// Largest real part; -inf for the empty spectrum.
  double max_real() const;
  /// Every non-real value has its conjugate present (within tol).
  bool conjugate_closed(double tol) const;

 private:
  std::vector<Complex> values_;
};

/// Largest pairwise distance after greedily matching closest pairs; +inf when
/// the sizes differ.
double spectrum_distance(const Spectrum& a, const Spectrum& b);
inline bool spectra_match(const Spectrum& a, const Spectrum& b, double tol) {
  return spectrum_distance(a, b) <= tol;
}

/// Subspace of R^n carried by an orthonormal basis. The basis is
/// canonicalized from the orthogonal projector, so two constructions of the
/// same subspace produce (numerically) the same basis.
class Subspace {
 public:
  /// The zero subspace of R^ambient.
  explicit Subspace(Index ambient = 0);

  /// Span of the columns of `cols`, rank decided as described above.
  static Subspace span(const Matrix& cols, double tol = kDefaultTol, double ref_scale = 0.0);
  static Subspace full(Index ambient);
  /// Wraps a matrix whose columns are already orthonormal (re-canonicalized).
  static Subspace from_orthonormal(const Matrix& q);

  Index ambient_dim() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  Subspace orthogonal_complement() const;

 private:
  Subspace(Index ambient, Matrix basis) : ambient_(ambient), basis_(std::move(basis)) {}
  Index ambient_;
  Matrix basis_;
};

struct RankFactorization {
  Index rank = 0;
  Subspace col_space;
  Subspace null_space;
  Subspace left_null_space;
  Vector singular_values;
  double threshold = 0.0;
};

RankFactorization rank_factor(const Matrix& m, double tol = kDefaultTol, double ref_scale = 0.0);

Index numerical_rank(const Matrix& m, double tol = kDefaultTol, double ref_scale = 0.0);
Index numerical_rank(const CMatrix& m, double tol = kDefaultTol, double ref_scale = 0.0);

/// Null-space basis in column echelon form: pivot rows are chosen greedily
/// from the last row upwards and the pivot block is the identity. Not
/// orthonormal, but reproducible and free of sign ambiguity.
Matrix echelon_null_basis(const Matrix& m, double tol = kDefaultTol, double ref_scale = 0.0);

/// Moore-Penrose pseudo-inverse with the shared rank threshold.
Matrix pinv(const Matrix& m, double tol = kDefaultTol, double ref_scale = 0.0);

/// Eigenvalues via Hessenberg reduction and shifted QR (real Schur form).
/// Throws NumericalError when the QR iteration does not converge.
Spectrum eig(const Matrix& m);

struct RealSchurForm {
  Matrix T;  // quasi upper triangular, 2x2 blocks for complex pairs
  Matrix U;  // orthogonal, m = U T U^T
};
RealSchurForm real_schur(const Matrix& m);

struct ComplexSchurForm {
  CMatrix T;  // upper triangular
  CMatrix Z;  // unitary, m = Z T Z^H
};
ComplexSchurForm complex_schur(const Matrix& m);

/// Reorders `form` so that the diagonal entries flagged in `select` (indexed
/// by their current position) occupy the leading block, preserving their
/// relative order. Returns the size of the leading block.
Index reorder_schur(ComplexSchurForm& form, std::vector<bool> select);

/// Real orthonormal basis of the span of complex columns whose span is closed
/// under conjugation (an invariant subspace of a real matrix for a
/// conjugate-closed set of eigenvalues).
Matrix real_basis_of_conjugate_closed(const CMatrix& cols, double tol = kDefaultTol);

/// Solves A X + X B + C = 0 by complex Schur back-substitution.
/// Throws SolvabilityError naming the common eigenvalue when
/// sigma(A) and sigma(-B) intersect.
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c,
                       double tol = kDefaultTol);

/// Solves A^T X + X A + Q = 0.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q, double tol = kDefaultTol);

/// Matrix exponential (Pade approximant with scaling and squaring).
Matrix expm(const Matrix& m);

/// Eigen-decomposition of a symmetric matrix that is positive semidefinite up
/// to a band: eigenvalues in [-tol*lambda_max, 0) are clamped to zero,
/// anything below that throws DomainError.
struct PsdDecomposition {
  Vector eigenvalues;   // ascending, clamped
  Matrix eigenvectors;  // orthonormal columns
  double threshold = 0.0;
  Index rank = 0;  // eigenvalues above threshold
};
PsdDecomposition psd_decompose(const Matrix& m, double tol = kDefaultTol, std::string_view what = "matrix");

/// Principal square root of a PSD matrix (same clamp band as psd_decompose).
Matrix psd_sqrt(const Matrix& m, double tol = kDefaultTol);

// Subspace arithmetic. Ambient mismatch throws InputError.
Subspace subspace_sum(const Subspace& u, const Subspace& v, double tol = kDefaultTol);
Subspace subspace_intersection(const Subspace& u, const Subspace& v, double tol = kDefaultTol);
/// True when v is contained in u (rank of [U V] equals dim U).
bool subspace_contains(const Subspace& u, const Subspace& v, double tol = kDefaultTol);
bool subspace_equal(const Subspace& u, const Subspace& v, double tol = kDefaultTol);
/// Gap between subspaces: max of the two projection residual norms; 1 when
/// dimensions differ.
double subspace_gap(const Subspace& u, const Subspace& v);

struct SubspaceRelations {
  Subspace sum;
  Subspace intersection;
  bool contains = false;  // v ⊆ u
  bool equal = false;
};
SubspaceRelations subspace_ops(const Subspace& u, const Subspace& v, double tol = kDefaultTol);

/// Smallest A-invariant subspace containing im B, by the fixpoint
/// V <- im B + A V (at most n steps). ref_scale anchors the rank decision on
/// B when B may be numerically zero.
Subspace krylov_subspace(const Matrix& a, const Matrix& b, double tol = kDefaultTol, double ref_scale = 0.0);

/// Image of a subspace under a linear map.
Subspace image(const Matrix& map, const Subspace& v, double tol = kDefaultTol, double ref_scale = 0.0);

}  // namespace riccati_geom
