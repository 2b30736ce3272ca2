#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

/// Solution data of [A_X; C_X] P = [P; 0] Xi + [B; D] Omega on P = basis of
/// R0,X: the pseudo-inverse particular solution and an echelon basis
/// [H1; H2] of ker [[P, B], [0, D]].
struct XiOmega {
  Matrix P;
  Matrix Xi_hat;
  Matrix Omega_hat;
  Matrix H1;
  Matrix H2;
  double defect = 0.0;  // residual of the particular solution
};

/// std::nullopt when R0,X = {0} (nothing to stabilize). Throws DomainError
/// unless X verifies.
std::optional<XiOmega> xi_omega(const PopovTriple& sigma, const Matrix& X, double tol = kDefaultTol);

/// K with sigma(Xi_hat + H1 K) = targets. Single input: Ackermann. Several
/// inputs: a seeded random feedback and input combination reduce to one
/// input (at most 5 draws). Throws InputError for a wrong count or targets
/// not closed under conjugation, DomainError for an unreachable pair.
Matrix place_poles(const Matrix& Xi_hat, const Matrix& H1, const Spectrum& targets, double tol = kDefaultTol,
                   std::uint64_t seed = kDefaultSeed);

struct StabilizationResult {
  bool nothing_to_stabilize = false;  // R0,X = {0}
  Matrix P;
  Matrix Xi_hat;
  Matrix Omega_hat;
  Matrix H1;
  Matrix H2;
  Matrix K;
  Matrix Xi;
  Matrix Omega;
  Matrix L;     // m x n, L = -Omega P^+
  Matrix A_cl;  // A_X + B L
  Spectrum assigned;
  Spectrum untouched;    // A_X on the quotient modulo R0,X
  Spectrum closed_loop;  // sigma(A_X + B L)
  bool hurwitz = false;
};

/// Default targets {-1, ..., -r}.
StabilizationResult stabilizing_gain(const PopovTriple& sigma, const Matrix& X,
                                     const std::optional<Spectrum>& targets = std::nullopt,
                                     double tol = kDefaultTol, std::uint64_t seed = kDefaultSeed);

struct Check {
  std::string name;
  bool pass = false;
  double defect = 0.0;
  double threshold = 0.0;
  bool informational = false;  // reported, not part of the verdict
};

struct StabilizationReport {
  std::vector<Check> checks;
  bool all_pass() const;
};

/// Invariance of R0,X, C_X P = 0, quotient spectrum unchanged, the XU
/// residual, L vanishing off R0,X, assigned-spectrum accuracy and cost
/// equality on `samples` seeded initial states. Hurwitz status is
/// informational.
StabilizationReport verify_stabilization(const PopovTriple& sigma, const Matrix& X, const StabilizationResult& result,
                                         double tol = kDefaultTol, std::uint64_t seed = kDefaultSeed,
                                         std::size_t samples = 5);

}  // namespace riccati_geom
