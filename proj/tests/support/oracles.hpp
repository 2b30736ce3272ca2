#pragma once

// Reference computations that share no code path with the library.

#include <optional>

#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom::testing {

/// A X + X B + C = 0 through the Kronecker-vectorized linear system.
Matrix kron_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);
/// A^T X + X A + Q = 0.
Matrix kron_lyapunov(const Matrix& a, const Matrix& q);

/// Largest residual of the four Moore-Penrose identities, relative to
/// max(1, ||m||, ||p||).
double moore_penrose_defect(const Matrix& m, const Matrix& p);

/// Stabilizing solution of the regular CARE from the eigenvectors of the
/// Hamiltonian matrix (no Schur reordering).
Matrix care_by_eigenvectors(const PopovTriple& sigma);

/// Popov function straight from its definition, optionally with Pi_X.
CMatrix popov_direct(const PopovTriple& sigma, Complex s, const std::optional<Matrix>& x = std::nullopt);

/// Rank counting singular values above rtol * sigma_max (absolute floor 1e-300).
Index plain_rank(const CMatrix& m, double rtol);

/// Orthogonal projector onto im [B, AB, ..., A^{n-1} B].
Matrix controllability_projector(const Matrix& a, const Matrix& b, double rtol);

/// Projector onto the column span of m.
Matrix span_projector(const Matrix& m, double rtol);

/// exp(m) from a scaled Taylor series.
Matrix expm_taylor(const Matrix& m);

}  // namespace riccati_geom::testing
