#include "riccati_geom/stabilize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/errors.hpp"
#include "riccati_geom/geometry.hpp"
#include "riccati_geom/sim.hpp"

namespace riccati_geom {

namespace {

// Real coefficients of prod (x - t), highest degree first (monic).
std::vector<double> characteristic(const Spectrum& targets) {
  std::vector<Complex> c{1.0};
  for (const Complex& t : targets.values()) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= t * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> out;
  for (const Complex& v : c) out.push_back(v.real());
  return out;
}

// k with sigma(a + b k) = targets for a single input column b, or nullopt
// when the controllability matrix is numerically singular.
std::optional<Matrix> ackermann(const Matrix& a, const Vector& b, const std::vector<double>& poly, double tol) {
  const Index r = a.rows();
  Matrix ctrb(r, r);
  Vector col = b;
  for (Index j = 0; j < r; ++j) {
    ctrb.col(j) = col;
    col = a * col;
  }
  if (numerical_rank(ctrb, tol) < r) return std::nullopt;
  Matrix p = Matrix::Zero(r, r);
  for (double c : poly) p = p * a + c * Matrix::Identity(r, r);
  const Vector last = ctrb.transpose().colPivHouseholderQr().solve(Vector::Unit(r, r - 1));
  return Matrix(-(last.transpose() * p));
}

void require_verified(const PopovTriple& sigma, const Matrix& X, double tol, const char* op) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  if (!c.verified()) {
    throw DomainError(std::string(op) + ": X does not solve CGCARE (status " + to_string(c.status) + ")");
  }
}

}  // namespace

std::optional<XiOmega> xi_omega(const PopovTriple& sigma, const Matrix& X, double tol) {
  require_verified(sigma, X, tol, "xi_omega");
  const Subspace r0 = r0x(sigma, X, tol);
  if (r0.dim() == 0) return std::nullopt;
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const Quadruple closed{d.A_X, sigma.B, d.C_X, d.factor.D};
  const InvarianceSolution s = solve_invariance(closed, r0.basis(), tol);
  XiOmega out;
  out.P = r0.basis();
  out.Xi_hat = s.Xi_hat;
  out.Omega_hat = s.Omega_hat;
  out.H1 = s.H1;
  out.H2 = s.H2;
  out.defect = s.defect;
  return out;
}

Matrix place_poles(const Matrix& Xi_hat, const Matrix& H1, const Spectrum& targets, double tol, std::uint64_t seed) {
  const Index r = Xi_hat.rows();
  const Index k = H1.cols();
  require_shape(Xi_hat, r, r, "Xi_hat");
  require_shape(H1, r, k, "H1");
  if (static_cast<Index>(targets.size()) != r) {
    std::ostringstream os;
    os << "need " << r << " target eigenvalues, got " << targets.size();
    throw InputError(os.str());
  }
  for (const Complex& t : targets.values()) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) throw InputError("target eigenvalues must be finite");
  }
  if (!targets.conjugate_closed(1e-12 * (1.0 + Xi_hat.norm()))) {
    throw InputError("target eigenvalues must be closed under complex conjugation");
  }
  if (r == 0) return Matrix::Zero(k, 0);
  const Index reach = krylov_subspace(Xi_hat, H1, tol, std::max(1.0, Xi_hat.norm())).dim();
  if (reach < r) {
    std::ostringstream os;
    os << "the pair (Xi_hat, H1) is not reachable (reachable dimension " << reach << " of " << r << ")";
    throw DomainError(os.str());
  }
  const std::vector<double> poly = characteristic(targets);
  auto accept = [&](const Matrix& K) {
    return spectrum_distance(eig(Xi_hat + H1 * K), targets) <= 1e-6;
  };

  if (k == 1) {
    const std::optional<Matrix> K = ackermann(Xi_hat, H1.col(0), poly, tol);
    if (!K || !accept(*K)) throw NumericalError("single-input pole placement lost accuracy");
    return *K;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix F0(k, r);
    Vector v(k);
    for (Index i = 0; i < F0.size(); ++i) F0.data()[i] = normal(rng);
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    const Matrix a = Xi_hat + H1 * F0;
    const std::optional<Matrix> k1 = ackermann(a, H1 * v, poly, tol);
    if (!k1) continue;
    const Matrix K = F0 + v * *k1;
    if (accept(K)) return K;
  }
  throw NumericalError("multi-input pole placement failed after 6 random reductions");
}

StabilizationResult stabilizing_gain(const PopovTriple& sigma, const Matrix& X, const std::optional<Spectrum>& targets,
                                     double tol, std::uint64_t seed) {
  const std::optional<XiOmega> xo = xi_omega(sigma, X, tol);
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const Index n = sigma.n();
  StabilizationResult out;
  if (!xo) {
    if (targets && !targets->empty()) throw InputError("R0,X = {0}: there is nothing to place, targets must be empty");
    out.nothing_to_stabilize = true;
    out.P = Matrix(n, 0);
    out.L = Matrix::Zero(sigma.m(), n);
    out.A_cl = d.A_X;
    out.untouched = eig(d.A_X);
    out.closed_loop = out.untouched;
    out.hurwitz = out.closed_loop.max_real() < 0.0;
    return out;
  }
  const Index r = xo->P.cols();
  Spectrum goal;
  if (targets) {
    goal = *targets;
  } else {
    std::vector<Complex> v;
    for (Index i = 1; i <= r; ++i) v.emplace_back(-static_cast<double>(i), 0.0);
    goal = Spectrum(v);
  }
  out.P = xo->P;
  out.Xi_hat = xo->Xi_hat;
  out.Omega_hat = xo->Omega_hat;
  out.H1 = xo->H1;
  out.H2 = xo->H2;
  out.K = place_poles(out.Xi_hat, out.H1, goal, tol, seed);
  out.Xi = out.Xi_hat + out.H1 * out.K;
  out.Omega = out.Omega_hat + out.H2 * out.K;
  out.L = -out.Omega * out.P.transpose();
  out.A_cl = d.A_X + sigma.B * out.L;
  out.assigned = goal;
  const Matrix P2 = Subspace::from_orthonormal(out.P).orthogonal_complement().basis();
  out.untouched = eig(Matrix(P2.transpose() * d.A_X * P2));
  out.closed_loop = eig(out.A_cl);
  out.hurwitz = out.closed_loop.max_real() < 0.0;
  return out;
}

bool StabilizationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.informational; });
}

StabilizationReport verify_stabilization(const PopovTriple& sigma, const Matrix& X, const StabilizationResult& result,
                                         double tol, std::uint64_t seed, std::size_t samples) {
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const Index n = sigma.n();
  require_shape(result.L, sigma.m(), n, "L");
  StabilizationReport rep;
  const double scale = 1.0 + d.A_X.norm() + d.C_X.norm() + sigma.B.norm() + d.factor.D.norm() + result.L.norm();
  const double thr = tol * scale;
  auto add = [&](const std::string& name, double defect, double threshold, bool informational = false) {
    rep.checks.push_back({name, defect <= threshold, defect, threshold, informational});
  };

  const Matrix& P = result.P;
  const Matrix A_cl = d.A_X + sigma.B * result.L;
  const Index r = P.cols();
  const Matrix P2 = Subspace::from_orthonormal(P).orthogonal_complement().basis();

  if (r > 0) {
    add("r0_invariant", (A_cl * P - P * (P.transpose() * A_cl * P)).norm(), thr);
    add("r0_in_ker_CX", (d.C_X * P).norm(), thr);
    const Matrix res_top = d.A_X * P - P * result.Xi - sigma.B * result.Omega;
    const Matrix res_bot = d.C_X * P - d.factor.D * result.Omega;
    add("xu_residual", std::sqrt(res_top.squaredNorm() + res_bot.squaredNorm()), thr);
    add("assigned_spectrum", spectrum_distance(eig(Matrix(P.transpose() * A_cl * P)), result.assigned), 1e-6);
  }
  add("L_vanishes_off_R0", (result.L * P2).norm(), thr);
  add("quotient_spectrum",
      spectrum_distance(eig(Matrix(P2.transpose() * A_cl * P2)), eig(Matrix(P2.transpose() * d.A_X * P2))), 1e-6);

  // Cost along -K_X and -K_X + L from seeded initial states.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    Vector x0(n);
    for (Index j = 0; j < n; ++j) x0(j) = normal(rng);
    const CostResult before = cost(sigma, d.K_X, x0, tol);
    const CostResult after = cost(sigma, d.K_X - result.L, x0, tol);
    if (before.finite != after.finite) {
      worst = std::numeric_limits<double>::infinity();
    } else if (before.finite) {
      worst = std::max(worst, std::abs(before.J - after.J) / (1.0 + std::abs(before.J)));
    }
  }
  add("cost_invariance", worst, 1e-6);

  const double max_real = eig(A_cl).max_real();
  rep.checks.push_back({"closed_loop_hurwitz", max_real < 0.0, max_real, 0.0, true});
  return rep;
}

}  // namespace riccati_geom
