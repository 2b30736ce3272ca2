#include "riccati_geom/sim.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

constexpr int kNodes = 16;

struct GaussLegendre {
  std::array<double, kNodes> x{};  // on [0, 1]
  std::array<double, kNodes> w{};
};

// Golub-Welsch on the Legendre Jacobi matrix, mapped to [0, 1].
const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule = [] {
    Matrix j = Matrix::Zero(kNodes, kNodes);
    for (int k = 1; k < kNodes; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      j(k, k - 1) = b;
      j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(j);
    GaussLegendre g;
    for (int i = 0; i < kNodes; ++i) {
      g.x[i] = 0.5 * (es.eigenvalues()(i) + 1.0);
      const double v0 = es.eigenvectors()(0, i);
      g.w[i] = v0 * v0;  // 2 v0^2 on [-1, 1], halved for [0, 1]
    }
    return g;
  }();
  return rule;
}

bool hurwitz(const Matrix& a, double tol) {
  if (a.rows() == 0) return true;
  return eig(a).max_real() < -tol * std::max(1.0, a.norm());
}

// Orthonormal real basis of the invariant subspace for Re(lambda) < -thr.
Matrix stable_basis(const Matrix& a, double tol) {
  ComplexSchurForm form = complex_schur(a);
  const double thr = tol * std::max(1.0, a.norm());
  std::vector<bool> select(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) select[static_cast<std::size_t>(i)] = form.T(i, i).real() < -thr;
  const Index k = reorder_schur(form, select);
  return real_basis_of_conjugate_closed(form.Z.leftCols(k), tol);
}

// int_0^inf ||C e^{A t} z||^2 dt for Hurwitz A.
CostResult integrate(const Matrix& A, const Matrix& C, const Vector& z, const CostOptions& opt) {
  CostResult out;
  out.method = CostMethod::kQuadrature;
  if (z.size() == 0 || C.rows() == 0) return out;
  const GaussLegendre& gl = gauss_legendre();
  const double tau = 1.0 / (1.0 + A.norm());
  std::map<double, std::array<Matrix, kNodes + 1>> cache;  // node propagators and the end step per length
  auto propagators = [&](double h) -> const std::array<Matrix, kNodes + 1>& {
    auto it = cache.find(h);
    if (it != cache.end()) return it->second;
    std::array<Matrix, kNodes + 1> p;
    for (int i = 0; i < kNodes; ++i) p[i] = expm(A * (gl.x[i] * h));
    p[kNodes] = expm(A * h);
    return cache.emplace(h, std::move(p)).first->second;
  };

  Vector state = z;
  double total = 0.0;
  double prev = -1.0;
  for (Index panel = 0;; ++panel) {
    const double len = tau * std::ldexp(1.0, static_cast<int>(std::min<Index>(panel, 1000)));
    const Index subs = std::max<Index>(1, static_cast<Index>(std::ceil(len / (4.0 * tau))));
    if (out.panels + subs > opt.max_subpanels) {
      out.J = std::numeric_limits<double>::infinity();
      out.finite = false;
      return out;
    }
    const double h = len / static_cast<double>(subs);
    const auto& p = propagators(h);
    double contribution = 0.0;
    for (Index s = 0; s < subs; ++s) {
      double part = 0.0;
      for (int i = 0; i < kNodes; ++i) part += gl.w[i] * (C * (p[i] * state)).squaredNorm();
      contribution += part * h;
      state = p[kNodes] * state;
    }
    out.panels += subs;
    total += contribution;
    if (panel >= 2 && contribution <= opt.rel_stop * total && prev > 0.0) {
      const double q = contribution / prev;
      if (q < 1.0) {
        out.tail_bound = contribution * q / (1.0 - q);
        break;
      }
    }
    if (panel >= 2 && total == 0.0 && contribution == 0.0) break;
    prev = contribution;
  }
  out.J = total;
  return out;
}

}  // namespace

const char* to_string(CostMethod method) {
  return method == CostMethod::kLyapunov ? "lyapunov" : "quadrature";
}

SimulationResult simulate(const Matrix& A_cl, const Vector& x0, double horizon, Index steps) {
  if (A_cl.rows() != A_cl.cols()) throw InputError("simulate: closed-loop matrix must be square");
  if (x0.size() != A_cl.rows()) throw InputError("simulate: x0 has the wrong length");
  if (steps < 2) throw InputError("simulate: need at least 2 steps");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InputError("simulate: horizon must be finite and >= 0");
  require_finite(A_cl, "A_cl");
  require_finite(x0, "x0");
  SimulationResult out;
  out.times.reserve(static_cast<std::size_t>(steps));
  out.states.reserve(static_cast<std::size_t>(steps));
  for (Index i = 0; i < steps; ++i) {
    const double t = horizon * static_cast<double>(i) / static_cast<double>(steps - 1);
    out.times.push_back(t);
    out.states.push_back(i == 0 ? x0 : Vector(expm(A_cl * t) * x0));
  }
  return out;
}

CostResult cost(const PopovTriple& sigma, const Matrix& K, const Vector& x0, double tol, const CostOptions& options) {
  validate(sigma, tol);
  const Index n = sigma.n();
  require_shape(K, sigma.m(), n, "K");
  require_finite(K, "K");
  if (x0.size() != n) throw InputError("cost: x0 has the wrong length");
  require_finite(x0, "x0");

  const Matrix A_cl = sigma.A - sigma.B * K;
  const OutputFactorization f = factor_popov(sigma, tol);
  const Matrix C_cl = f.C - f.D * K;

  if (!options.force_quadrature && hurwitz(A_cl, tol)) {
    const Matrix Q_cl = C_cl.transpose() * C_cl;
    const Matrix P = solve_lyapunov(A_cl, Q_cl, tol);
    CostResult out;
    out.method = CostMethod::kLyapunov;
    out.observable = n;
    out.J = std::max(0.0, x0.dot(P * x0));
    return out;
  }

  // Observable quotient of (C_cl, A_cl): W spans the orthogonal complement
  // of the unobservable subspace.
  Matrix obs(C_cl.rows() * n, n);
  Matrix block = C_cl;
  for (Index k = 0; k < n; ++k) {
    obs.middleRows(k * C_cl.rows(), C_cl.rows()) = block;
    block = block * A_cl;
  }
  // Anchor at the size of [C D] so that a numerically zero weight reads as
  // fully unobservable.
  const Matrix W = rank_factor(obs, tol, std::sqrt(std::max(1.0, sigma.pi_norm()))).null_space.orthogonal_complement().basis();
  const Index o = W.cols();
  if (o == 0) {
    CostResult out;
    out.method = options.force_quadrature ? CostMethod::kQuadrature : CostMethod::kLyapunov;
    return out;
  }
  const Matrix Aq = W.transpose() * A_cl * W;
  const Matrix Cq = C_cl * W;
  const Vector z0 = W.transpose() * x0;

  const Matrix Ws = stable_basis(Aq, tol);
  const Vector w0 = Ws.transpose() * z0;
  const double leak = (z0 - Ws * w0).norm();
  if (leak > 1e2 * tol * std::max(1.0, z0.norm())) {
    CostResult out;
    out.method = CostMethod::kQuadrature;
    out.observable = o;
    out.J = std::numeric_limits<double>::infinity();
    out.finite = false;
    return out;
  }
  CostResult out = integrate(Ws.transpose() * Aq * Ws, Cq * Ws, w0, options);
  out.observable = o;
  return out;
}

OptimalCostReport optimal_cost_check(const PopovTriple& sigma, const Matrix& X, const Vector& x0, double tol) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  if (!c.verified()) {
    throw DomainError(std::string("optimal_cost_check: X does not solve CGCARE (status ") + to_string(c.status) + ")");
  }
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  OptimalCostReport out;
  out.cost = cost(sigma, d.K_X, x0, tol);
  out.predicted = x0.dot(X * x0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (X + X.transpose()), Eigen::EigenvaluesOnly);
  out.x_psd = X.rows() == 0 || es.eigenvalues().minCoeff() >= -tol * std::max(1.0, X.norm());
  if (!out.cost.finite) {
    out.gap = std::numeric_limits<double>::infinity();
    out.note = "cost along -K_X is infinite for this x0; candidate not value-function certified";
    return out;
  }
  out.gap = std::abs(out.cost.J - out.predicted) / (1.0 + std::abs(out.cost.J));
  out.value_certified = out.gap <= 1e-6;
  if (!out.value_certified) {
    std::ostringstream os;
    os << "J = " << out.cost.J << " differs from x0^T X x0 = " << out.predicted
       << "; candidate not value-function certified";
    if (!out.x_psd) os << " (X is not positive semidefinite)";
    out.note = os.str();
  }
  return out;
}

}  // namespace riccati_geom
