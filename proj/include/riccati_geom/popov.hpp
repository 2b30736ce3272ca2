#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "riccati_geom/linalg.hpp"

namespace riccati_geom {

/// Problem data of the LQ problem: dynamics (A, B) and the symmetric cost
/// weight Pi = [[Q, S], [S^T, R]].
struct PopovTriple {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix Q;  // n x n
  Matrix S;  // n x m
  Matrix R;  // m x m

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Matrix pi() const;
  /// ||Pi|| (Frobenius), used as the problem's cost scale.
  double pi_norm() const { return pi().norm(); }
};

/// Shapes, finiteness and symmetry of Q and R. Throws InputError.
void validate(const PopovTriple& sigma, double tol = kDefaultTol);

/// Both Schur-complement characterizations of Pi >= 0, each with its
/// measured defect (a negative minimum eigenvalue, or a kernel leak norm).
struct PopovCheck {
  bool psd = false;
  bool kerR_in_kerS = false;
  bool schur_primal_psd = false;
  bool R_psd = false;
  bool kerQ_in_kerST = false;
  bool schur_dual_psd = false;
  bool Q_psd = false;
  bool identities = false;  // S R^+ R = S and S^T Q^+ Q = S^T

  double pi_min_eig = 0.0;
  double R_min_eig = 0.0;
  double kerR_defect = 0.0;
  double schur_primal_min_eig = 0.0;
  double Q_min_eig = 0.0;
  double kerQ_defect = 0.0;
  double schur_dual_min_eig = 0.0;
  double identity_defect = 0.0;
  double threshold = 0.0;

  bool primal() const { return R_psd && kerR_in_kerS && schur_primal_psd; }
  bool dual() const { return Q_psd && kerQ_in_kerST && schur_dual_psd; }
  bool all() const { return psd && primal() && dual() && identities; }
};

PopovCheck check_popov(const PopovTriple& sigma, double tol = kDefaultTol);

/// Pi = [C D]^T [C D] with p = rank Pi rows.
struct OutputFactorization {
  Matrix C;  // p x n
  Matrix D;  // p x m
  Index p() const { return C.rows(); }
};

/// Minimal factor from the symmetric eigendecomposition of Pi. Throws
/// DomainError when Pi is indefinite beyond the clamp band.
OutputFactorization factor_popov(const PopovTriple& sigma, double tol = kDefaultTol);

/// Popov function
///   Phi(s) = [B^T(-sI - A^T)^{-1}  I] Pi [(sI - A)^{-1} B; I]
/// evaluated at a complex point. When `x` is given, Pi is replaced by Pi_X;
/// the value is the same for every symmetric X. Throws PoleError when s or
/// -s is an eigenvalue of A.
CMatrix popov_function(const PopovTriple& sigma, Complex s, const std::optional<Matrix>& x = std::nullopt,
                       double tol = kDefaultTol);

/// Orthogonal input coordinates adapted to R: im T1 = im R, im T2 = ker R.
struct InputSplit {
  Matrix G;   // orthogonal projector onto ker R
  Matrix T1;  // m x m1
  Matrix T2;  // m x m2
  Matrix B1;  // B T1
  Matrix B2;  // B T2
  Matrix R0;  // T1^T R T1, nonsingular
  Index m1 = 0;
  Index m2 = 0;

  Matrix T() const;
};

InputSplit input_split(const PopovTriple& sigma, double tol = kDefaultTol);

/// Seeded sample points for rational-function identities, kept away from a
/// disk around sigma(A) and sigma(-A^T).
std::vector<Complex> sample_points(const Matrix& a, std::size_t count, std::uint64_t seed = kDefaultSeed);

}  // namespace riccati_geom
