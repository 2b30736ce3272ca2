#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

/// Quadruple (A, B, C, D) of x' = Ax + Bu, y = Cx + Du.
struct Quadruple {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
};

/// Quadruple whose output factorizes Pi: Pi = [C D]^T [C D].
Quadruple output_quadruple(const PopovTriple& sigma, double tol = kDefaultTol);

/// <A | im B>: smallest A-invariant subspace containing im B.
Subspace reachable_subspace(const Matrix& A, const Matrix& B, double tol = kDefaultTol, double ref_scale = 0.0);

/// An output-nulling subspace V with a friend F:
/// (A + BF) V ⊆ V ⊆ ker(C + DF), and Xi = V^T (A + BF) V.
struct OutputNullingCertificate {
  Subspace V;
  Matrix friend_F;
  Matrix Xi;
  std::vector<Index> dims;  // ISA recursion: dim V_0, dim V_1, ...
  double invariance_defect = 0.0;
  double nulling_defect = 0.0;
};

/// V* by the recursion V_{k+1} = V_k ∩ {x : [A;C] x ∈ im [[V_k, B], [0, D]]}.
OutputNullingCertificate largest_output_nulling(const Quadruple& q, double tol = kDefaultTol);

/// Least-squares solution of [A;C] V = [V;0] Xi + [B;D] Omega, V = basis,
/// together with a basis [H1; H2] (echelon form) of ker [[V, B], [0, D]].
/// Every solution is (Xi_hat + H1 K, Omega_hat + H2 K).
struct InvarianceSolution {
  Matrix Xi_hat;
  Matrix Omega_hat;
  Matrix H1;
  Matrix H2;
  double defect = 0.0;     // residual of the least-squares fit
  double threshold = 0.0;  // defect above this means V is not output-nulling
};
InvarianceSolution solve_invariance(const Quadruple& q, const Matrix& basis, double tol = kDefaultTol);

/// F = -Omega V^T (zero on the orthogonal complement of V). `kernel_coeff`
/// moves Omega along H2 to obtain a different friend. Throws DomainError when
/// V is not output-nulling.
Matrix friend_of(const Quadruple& q, const Subspace& V, double tol = kDefaultTol,
                 const std::optional<Matrix>& kernel_coeff = std::nullopt);

/// <A + BF | V ∩ B ker D> for a friend F of V (computed, or given).
Subspace reachability_on(const Quadruple& q, const Subspace& V, double tol = kDefaultTol,
                         const std::optional<Matrix>& friend_F = std::nullopt);

/// R0,X = <A_X | im BG>. Recomputed as <A - B R^+ S^T | im BG>; a mismatch
/// throws InternalConsistencyError. Throws DomainError unless X verifies.
Subspace r0x(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

struct KernelOutputNullingReport {
  bool solves_gcare = false;
  Subspace ker_X;
  bool is_output_nulling = false;   // some friend exists
  bool friend_is_minus_KX = false;  // -K_X is a friend
  double invariance_defect = 0.0;   // ||(I - PP^T) A_X P||
  double nulling_defect = 0.0;      // ||C_X P||
  double threshold = 0.0;
  std::vector<std::string> warnings;
};

/// ker X against the output-nulling property for the factor quadruple.
KernelOutputNullingReport check_kernel_output_nulling(const PopovTriple& sigma, const Matrix& X,
                                                      double tol = kDefaultTol);

}  // namespace riccati_geom
