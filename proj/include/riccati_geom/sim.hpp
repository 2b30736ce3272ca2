#pragma once

#include <vector>

#include "riccati_geom/linalg.hpp"
#include "riccati_geom/popov.hpp"

namespace riccati_geom {

struct SimulationResult {
  std::vector<double> times;
  std::vector<Vector> states;  // states[i] = expm(A_cl t_i) x0
};

/// Uniform grid of `steps` points on [0, horizon]. Throws InputError for
/// steps < 2, a negative horizon or mismatched sizes.
SimulationResult simulate(const Matrix& A_cl, const Vector& x0, double horizon, Index steps);

enum class CostMethod { kLyapunov, kQuadrature };
const char* to_string(CostMethod method);

/// J = int_0^inf [x; u]^T Pi [x; u] dt along u = -K x. Divergence is a value,
/// not an exception: finite = false and J = +inf.
struct CostResult {
  double J = 0.0;
  bool finite = true;
  CostMethod method = CostMethod::kLyapunov;
  double tail_bound = 0.0;
  Index panels = 0;      // quadrature sub-panels used
  Index observable = 0;  // dimension of the observable quotient
};

struct CostOptions {
  bool force_quadrature = false;  // integrate even when A - BK is Hurwitz
  double rel_stop = 1e-10;
  Index max_subpanels = Index(1) << 20;
};

/// A_cl = A - BK. Hurwitz A_cl: Lyapunov equation for the closed-loop weight.
/// Otherwise the integrand ||C_cl x||^2 (Pi = [C D]^T [C D], C_cl = C - DK)
/// is reduced to the observable quotient; the cost is finite exactly when the
/// quotient initial state lies in the stable invariant subspace, and is then
/// integrated by composite Gauss-Legendre quadrature on doubling panels.
CostResult cost(const PopovTriple& sigma, const Matrix& K, const Vector& x0, double tol = kDefaultTol,
                const CostOptions& options = {});

struct OptimalCostReport {
  CostResult cost;       // along u = -K_X x
  double predicted = 0;  // x0^T X x0
  double gap = 0;        // |J - predicted| / (1 + |J|)
  bool x_psd = false;
  bool value_certified = false;  // finite cost matching x0^T X x0 within 1e-6
  std::string note;
};

/// Compares the cost of u = -K_X x with x0^T X x0. Throws DomainError unless
/// X verifies.
OptimalCostReport optimal_cost_check(const PopovTriple& sigma, const Matrix& X, const Vector& x0,
                                     double tol = kDefaultTol);

}  // namespace riccati_geom
