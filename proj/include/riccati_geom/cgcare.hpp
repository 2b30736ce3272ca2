#pragma once

#include <cstdint>
#include <optional>

#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

enum class VerificationStatus { kUnchecked, kGcareOnly, kCgcare, kFailed };

const char* to_string(VerificationStatus status);

/// A symmetric candidate X with its verification against
///   X A + A^T X - (S + X B) R^+ (S^T + B^T X) + Q = 0,  ker R ⊆ ker(S + X B).
struct CandidateSolution {
  Matrix X;
  VerificationStatus status = VerificationStatus::kUnchecked;
  double residual_norm = 0.0;
  double constraint_defect = 0.0;
  double scale = 0.0;  // 1 + ||X|| ||A|| + ||Pi||
  double threshold = 0.0;
  double asymmetry = 0.0;

  bool verified() const { return status == VerificationStatus::kCgcare; }
};

struct DerivedMatrices {
  Matrix Q_X;   // Q + A^T X + X A
  Matrix S_X;   // S + X B
  Matrix K_X;   // R^+ S_X^T
  Matrix A_X;   // A - B K_X
  Matrix C_X;   // C - D K_X for the factor Pi = [C D]^T [C D]
  Matrix Q0X;   // Q - S R^+ S^T + X B R^+ B^T X
  Matrix Pi_X;  // [[Q_X, S_X], [S_X^T, R]]
  OutputFactorization factor;
};

/// Throws InputError when X is asymmetric or mis-sized, DomainError when Pi is
/// indefinite (C_X needs a factor of Pi).
DerivedMatrices derived_matrices(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

/// X A + A^T X - (S + X B) R^+ (S^T + B^T X) + Q, exactly as written.
Matrix gcare_residual(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

/// Never throws on a bad candidate: failures are reported in the status
/// (an asymmetric X is kFailed). Mis-sized input still throws InputError.
CandidateSolution verify_cgcare(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

/// W(s) = R^{1/2} R^+ S_X^T (sI - A)^{-1} B + R^{1/2}, so that
/// W^T(-s) W(s) = Phi(s). Throws DomainError unless X verifies, PoleError
/// when s is an eigenvalue of A.
CMatrix spectral_factor_sample(const PopovTriple& sigma, const Matrix& X, Complex s, double tol = kDefaultTol);

/// Largest rank of Phi over seeded sample points.
Index normal_rank_popov(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol,
                        std::uint64_t seed = kDefaultSeed, std::size_t samples = 5);

struct ReducedSolution {
  CandidateSolution solution;
  Index r = 0;                  // dim R0
  Matrix adapted_basis;         // orthogonal [P1 P2], im P1 = R0
  Spectrum hamiltonian;         // spectrum of the reduced Hamiltonian (or of F22 when m1 = 0)
  Spectrum selected;            // eigenvalues whose invariant subspace produced X22
};

/// Reduction solver. F = A - B R^+ S^T, R0 = <F | im B G>. In an orthonormal
/// basis adapted to R0 the unknown is X = diag(0, X22) and X22 solves a
/// regular CARE on the quotient (a Lyapunov equation when R = 0). By default
/// the stable invariant subspace of the reduced Hamiltonian is used; `targets`
/// instead names the Hamiltonian eigenvalues to select.
///
/// Errors: DomainError when Pi is indefinite; UnsupportedInstanceError when
/// Q - S R^+ S^T does not vanish on R0 (no solution of this shape exists) or
/// the selected subspace is not a graph; NoStabilizingSolutionError on
/// imaginary-axis eigenvalues; InputError for targets that do not match.
ReducedSolution solve_reduced(const PopovTriple& sigma, const std::optional<Spectrum>& targets = std::nullopt,
                              double tol = kDefaultTol);

}  // namespace riccati_geom
