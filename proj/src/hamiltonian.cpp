#include "riccati_geom/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

void require_verified(const PopovTriple& sigma, const Matrix& X, double tol, const char* op) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  if (!c.verified()) {
    std::ostringstream os;
    os << op << ": X does not solve CGCARE (status " << to_string(c.status) << ", residual " << c.residual_norm
       << ", constraint defect " << c.constraint_defect << ")";
    throw DomainError(os.str());
  }
}

// Constant and s-coefficient of P(s) = P0 - s E0 in [x; lambda; u] order.
void pencil_parts(const PopovTriple& sigma, const Matrix& A_X, Matrix& P0, Matrix& E0) {
  const Index n = sigma.n();
  const Index m = sigma.m();
  P0 = Matrix::Zero(2 * n + m, 2 * n + m);
  E0 = Matrix::Zero(2 * n + m, 2 * n + m);
  P0.block(0, 0, n, n) = A_X;
  P0.block(0, 2 * n, n, m) = sigma.B;
  P0.block(n, n, n, n) = -A_X.transpose();
  P0.block(2 * n, n, m, n) = sigma.B.transpose();
  P0.block(2 * n, 2 * n, m, m) = sigma.R;
  E0.block(0, 0, n, n) = Matrix::Identity(n, n);
  E0.block(n, n, n, n) = Matrix::Identity(n, n);
}

// Permutation matrix whose k-th column is e_{order[k]}.
Matrix permutation(const std::vector<Index>& order) {
  const Index size = static_cast<Index>(order.size());
  Matrix p = Matrix::Zero(size, size);
  for (Index k = 0; k < size; ++k) p(order[k], k) = 1.0;
  return p;
}

std::vector<Index> block_order(const std::vector<std::pair<Index, Index>>& blocks) {
  std::vector<Index> order;
  for (const auto& [start, len] : blocks) {
    for (Index i = 0; i < len; ++i) order.push_back(start + i);
  }
  return order;
}

}  // namespace

HamiltonianSystem build_hamiltonian(const PopovTriple& sigma, double tol) {
  validate(sigma, tol);
  const Index n = sigma.n();
  const Index m = sigma.m();
  HamiltonianSystem h;
  h.Ahat = Matrix::Zero(2 * n, 2 * n);
  h.Ahat.topLeftCorner(n, n) = sigma.A;
  h.Ahat.bottomLeftCorner(n, n) = -sigma.Q;
  h.Ahat.bottomRightCorner(n, n) = -sigma.A.transpose();
  h.Bhat.resize(2 * n, m);
  h.Bhat << sigma.B, -sigma.S;
  h.Chat.resize(m, 2 * n);
  h.Chat << sigma.S.transpose(), sigma.B.transpose();
  h.Dhat = sigma.R;
  return h;
}

CMatrix rosenbrock_matrix(const Quadruple& q, Complex s) {
  const Index n = q.A.rows();
  const Index m = q.B.cols();
  const Index p = q.C.rows();
  CMatrix out(n + p, n + m);
  out << q.A.cast<Complex>() - s * CMatrix::Identity(n, n), q.B.cast<Complex>(), q.C.cast<Complex>(),
      q.D.cast<Complex>();
  return out;
}

Index rosenbrock_rank(const Quadruple& q, Complex s, double tol) {
  return numerical_rank(rosenbrock_matrix(q, s), tol);
}

Index rosenbrock_normal_rank(const Quadruple& q, double tol, std::uint64_t seed, std::size_t samples) {
  Index best = 0;
  for (const Complex& s : sample_points(q.A, samples, seed)) best = std::max(best, rosenbrock_rank(q, s, tol));
  return best;
}

CMatrix hamiltonian_pencil(const PopovTriple& sigma, const Matrix& X, Complex s, double tol) {
  require_verified(sigma, X, tol, "hamiltonian_pencil");
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  Matrix P0, E0;
  pencil_parts(sigma, d.A_X, P0, E0);
  return P0.cast<Complex>() - s * E0.cast<Complex>();
}

CMatrix PencilDecomposition::block_form(Complex s) const {
  return F0.cast<Complex>() - s * E.cast<Complex>();
}

PencilDecomposition pencil_decompose(const PopovTriple& sigma, const Matrix& X, double tol) {
  require_verified(sigma, X, tol, "pencil_decompose");
  const Index n = sigma.n();
  const Index m = sigma.m();
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const InputSplit split = input_split(sigma, tol);
  const Subspace r0 = r0x(sigma, X, tol);

  PencilDecomposition out;
  out.n = n;
  out.r = r0.dim();
  out.m1 = split.m1;
  out.m2 = split.m2;
  const Index r = out.r;
  const Index n2 = n - r;
  out.T = split.T();
  out.H.resize(n, n);
  out.H << r0.basis(), r0.orthogonal_complement().basis();

  const Matrix At = out.H.transpose() * d.A_X * out.H;
  const Matrix B1t = out.H.transpose() * split.B1;
  const Matrix B2t = out.H.transpose() * split.B2;
  out.A_X11 = At.topLeftCorner(r, r);
  out.A_X12 = At.topRightCorner(r, n2);
  out.A_X22 = At.bottomRightCorner(n2, n2);
  out.B11 = B1t.topRows(r);
  out.B12 = B1t.bottomRows(n2);
  out.B21 = B2t.topRows(r);
  out.R0 = split.R0;

  // Adapted coordinates: [x1 x2 | l1 l2 | u1 u2], then reorder.
  Matrix Hhat = Matrix::Zero(2 * n + m, 2 * n + m);
  Hhat.block(0, 0, n, n) = out.H;
  Hhat.block(n, n, n, n) = out.H;
  Hhat.block(2 * n, 2 * n, m, m) = out.T;
  const Index x1 = 0, x2 = r, l1 = n, l2 = n + r, u1 = 2 * n, u2 = 2 * n + split.m1;
  const Matrix cols = permutation(block_order({{x1, r}, {u2, split.m2}, {l1, r}, {x2, n2}, {l2, n2}, {u1, split.m1}}));
  const Matrix rows = permutation(block_order({{x1, r}, {l1, r}, {u2, split.m2}, {x2, n2}, {l2, n2}, {u1, split.m1}}));
  out.V_X = Hhat * cols;
  out.U_X = rows.transpose() * Hhat.transpose();

  Matrix P0, E0;
  pencil_parts(sigma, d.A_X, P0, E0);
  out.F0 = out.U_X * P0 * out.V_X;
  out.E = out.U_X * E0 * out.V_X;

  out.normal_rank = 2 * n + split.m1;
  out.infinite_multiplicity = split.m1;
  const Spectrum gamma = eig(out.A_X22);
  out.finite_zeros = gamma.merged(gamma.mirrored());
  return out;
}

RankDrop confirm_rank_drop(const std::function<CMatrix(Complex)>& pencil, Complex s, Index normal_rank, double tol) {
  RankDrop out;
  const CMatrix center = pencil(s);
  // The rank threshold grows with the pencil norm, so the radius must too.
  const double smax = center.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMatrix>(center).singularValues()(0);
  out.delta = std::sqrt(tol) * std::max(1.0 + std::abs(s), smax);
  out.at_center = numerical_rank(center, tol);
  out.min_perturbed = normal_rank;
  const Complex shifts[] = {{out.delta, 0.0}, {-out.delta, 0.0}, {0.0, out.delta}, {0.0, -out.delta}};
  for (const Complex& h : shifts) out.min_perturbed = std::min(out.min_perturbed, numerical_rank(pencil(s + h), tol));
  out.genuine = out.at_center < normal_rank && out.min_perturbed == normal_rank;
  return out;
}

Spectrum invariant_zeros(const PopovTriple& sigma, const Matrix& X, double tol, std::uint64_t seed) {
  const PencilDecomposition pd = pencil_decompose(sigma, X, tol);
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  Matrix P0, E0;
  pencil_parts(sigma, d.A_X, P0, E0);
  const CMatrix P0c = P0.cast<Complex>();
  const CMatrix E0c = E0.cast<Complex>();
  const auto pencil = [&](Complex s) -> CMatrix { return P0c - s * E0c; };

  for (const Complex& z : pd.finite_zeros.values()) {
    const RankDrop drop = confirm_rank_drop(pencil, z, pd.normal_rank, tol);
    if (!drop.genuine) {
      std::ostringstream os;
      os << "zero " << z << " of Gamma_X: pencil rank " << drop.at_center << " at the point and "
         << drop.min_perturbed << " nearby, normal rank " << pd.normal_rank;
      throw InternalConsistencyError(os.str());
    }
  }
  for (const Complex& s : sample_points(d.A_X, 5, seed)) {
    bool near_zero = false;
    for (const Complex& z : pd.finite_zeros.values()) near_zero |= std::abs(s - z) < 1e-3 * (1.0 + std::abs(z));
    if (near_zero) continue;
    const Index rk = numerical_rank(pencil(s), tol);
    if (rk != pd.normal_rank) {
      std::ostringstream os;
      os << "pencil rank " << rk << " at sample point " << s << " differs from normal rank " << pd.normal_rank;
      throw InternalConsistencyError(os.str());
    }
  }
  return pd.finite_zeros;
}

}  // namespace riccati_geom
