#pragma once

#include <cstdint>
#include <functional>

#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/geometry.hpp"
#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

/// State [x; lambda] with lambda the costate:
///   Ahat = [[A, 0], [-Q, -A^T]], Bhat = [B; -S], Chat = [S^T B^T], Dhat = R.
struct HamiltonianSystem {
  Matrix Ahat;
  Matrix Bhat;
  Matrix Chat;
  Matrix Dhat;

  Quadruple quadruple() const { return {Ahat, Bhat, Chat, Dhat}; }
};

HamiltonianSystem build_hamiltonian(const PopovTriple& sigma, double tol = kDefaultTol);

/// [[A - sI, B], [C, D]] and its numerical rank.
CMatrix rosenbrock_matrix(const Quadruple& q, Complex s);
Index rosenbrock_rank(const Quadruple& q, Complex s, double tol = kDefaultTol);

/// Largest Rosenbrock rank over seeded sample points.
Index rosenbrock_normal_rank(const Quadruple& q, double tol = kDefaultTol, std::uint64_t seed = kDefaultSeed,
                             std::size_t samples = 5);

/// P(s) = [[A_X - sI, 0, B], [0, -(A_X^T + sI), 0], [0, B^T, R]].
/// Throws DomainError unless X verifies.
CMatrix hamiltonian_pencil(const PopovTriple& sigma, const Matrix& X, Complex s, double tol = kDefaultTol);

/// Block form of the pencil in coordinates adapted to R0,X and to the input
/// split. Columns are ordered [x1, u2, lambda1, x2, lambda2, u1] and rows
/// [x1, lambda1, u2, x2, lambda2, u1]; U_X P(s) V_X = F0 - s E.
struct PencilDecomposition {
  Index n = 0;
  Index r = 0;
  Index m1 = 0;
  Index m2 = 0;

  Matrix A_X11;  // r x r
  Matrix A_X12;  // r x (n-r)
  Matrix A_X22;  // Gamma_X, (n-r) x (n-r)
  Matrix B11;    // r x m1
  Matrix B12;    // (n-r) x m1
  Matrix B21;    // r x m2
  Matrix R0;     // m1 x m1

  Matrix T;    // input coordinates [T1 T2]
  Matrix H;    // state coordinates [P1 P2], im P1 = R0,X
  Matrix U_X;  // row transformation (orthogonal)
  Matrix V_X;  // column transformation (orthogonal)
  Matrix F0;
  Matrix E;

  Index normal_rank = 0;            // 2n + m1
  Spectrum finite_zeros;            // sigma(Gamma) ∪ sigma(-Gamma)
  Index infinite_multiplicity = 0;  // m1

  const Matrix& gamma() const { return A_X22; }
  CMatrix block_form(Complex s) const;
};

PencilDecomposition pencil_decompose(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

/// Rank of a pencil at s compared with the ranks at s +- delta and s +- i delta,
/// delta = sqrt(tol) max(1 + |s|, ||P(s)||). A genuine drop is below `normal_rank` at the
/// centre and back to `normal_rank` at all four perturbations.
struct RankDrop {
  Index at_center = 0;
  Index min_perturbed = 0;
  double delta = 0.0;
  bool genuine = false;
};
RankDrop confirm_rank_drop(const std::function<CMatrix(Complex)>& pencil, Complex s, Index normal_rank,
                           double tol = kDefaultTol);

/// sigma(Gamma_X) ∪ sigma(-Gamma_X), cross-checked against rank drops of the
/// pencil (at each zero) and full rank at seeded points away from them.
/// Throws InternalConsistencyError when the two disagree.
Spectrum invariant_zeros(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol,
                         std::uint64_t seed = kDefaultSeed);

}  // namespace riccati_geom
