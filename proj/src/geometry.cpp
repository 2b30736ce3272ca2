#include "riccati_geom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

void require_quadruple(const Quadruple& q) {
  const Index n = q.A.rows();
  const Index m = q.B.cols();
  const Index p = q.C.rows();
  require_shape(q.A, n, n, "A");
  require_shape(q.B, n, m, "B");
  require_shape(q.C, p, n, "C");
  require_shape(q.D, p, m, "D");
  require_finite(q.A, "A");
  require_finite(q.B, "B");
  require_finite(q.C, "C");
  require_finite(q.D, "D");
}

double system_scale(const Quadruple& q) {
  return std::max(1.0, std::sqrt(q.A.squaredNorm() + q.B.squaredNorm() + q.C.squaredNorm() + q.D.squaredNorm()));
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace

Quadruple output_quadruple(const PopovTriple& sigma, double tol) {
  const OutputFactorization f = factor_popov(sigma, tol);
  return {sigma.A, sigma.B, f.C, f.D};
}

Subspace reachable_subspace(const Matrix& A, const Matrix& B, double tol, double ref_scale) {
  return krylov_subspace(A, B, tol, ref_scale);
}

OutputNullingCertificate largest_output_nulling(const Quadruple& q, double tol) {
  require_quadruple(q);
  const Index n = q.A.rows();
  const Index p = q.C.rows();
  const Matrix ac = stack(q.A, q.C);
  const double scale = system_scale(q);
  OutputNullingCertificate out;
  Subspace v = Subspace::full(n);
  out.dims.push_back(v.dim());
  for (Index step = 0; step <= n; ++step) {
    Matrix m(n + p, v.dim() + q.B.cols());
    m << stack(v.basis(), Matrix::Zero(p, v.dim())), stack(q.B, q.D);
    const Subspace z = rank_factor(m, tol, scale).left_null_space;
    Subspace next = v;
    if (z.dim() > 0) {
      const Subspace pre = rank_factor(z.basis().transpose() * ac, tol, scale).null_space;
      next = subspace_intersection(v, pre, tol);
    }
    const bool stationary = next.dim() == v.dim();
    v = std::move(next);
    if (stationary) break;
    out.dims.push_back(v.dim());
  }
  out.V = v;
  out.friend_F = friend_of(q, v, tol);
  const Matrix acl = q.A + q.B * out.friend_F;
  const Matrix& basis = v.basis();
  out.Xi = basis.transpose() * acl * basis;
  out.invariance_defect = (acl * basis - basis * out.Xi).norm();
  out.nulling_defect = ((q.C + q.D * out.friend_F) * basis).norm();
  return out;
}

InvarianceSolution solve_invariance(const Quadruple& q, const Matrix& basis, double tol) {
  require_quadruple(q);
  const Index n = q.A.rows();
  const Index p = q.C.rows();
  const Index k = basis.cols();
  require_shape(basis, n, k, "subspace basis");
  const double scale = system_scale(q);
  Matrix m(n + p, k + q.B.cols());
  m << stack(basis, Matrix::Zero(p, k)), stack(q.B, q.D);
  const Matrix rhs = stack(q.A, q.C) * basis;
  const Matrix sol = pinv(m, tol, scale) * rhs;
  const Matrix h = echelon_null_basis(m, tol, scale);
  InvarianceSolution out;
  out.Xi_hat = sol.topRows(k);
  out.Omega_hat = sol.bottomRows(q.B.cols());
  out.H1 = h.topRows(k);
  out.H2 = h.bottomRows(q.B.cols());
  out.defect = (m * sol - rhs).norm();
  out.threshold = tol * scale * std::max<double>(1.0, static_cast<double>(n + p));
  return out;
}

Matrix friend_of(const Quadruple& q, const Subspace& V, double tol, const std::optional<Matrix>& kernel_coeff) {
  require_quadruple(q);
  const Index m = q.B.cols();
  if (V.ambient_dim() != q.A.rows()) throw InputError("friend_of: subspace lives in the wrong space");
  if (V.dim() == 0) return Matrix::Zero(m, q.A.rows());
  const InvarianceSolution s = solve_invariance(q, V.basis(), tol);
  if (s.defect > s.threshold) {
    std::ostringstream os;
    os << "subspace is not output-nulling: least-squares defect " << s.defect << " exceeds " << s.threshold;
    throw DomainError(os.str());
  }
  Matrix omega = s.Omega_hat;
  if (kernel_coeff) {
    require_shape(*kernel_coeff, s.H2.cols(), V.dim(), "friend kernel coefficient");
    omega += s.H2 * *kernel_coeff;
  }
  return -omega * V.basis().transpose();
}

Subspace reachability_on(const Quadruple& q, const Subspace& V, double tol, const std::optional<Matrix>& friend_F) {
  require_quadruple(q);
  const Matrix F = friend_F ? *friend_F : friend_of(q, V, tol);
  require_shape(F, q.B.cols(), q.A.rows(), "friend");
  const double scale = system_scale(q);
  const Subspace ker_d = rank_factor(q.D, tol, scale).null_space;
  const Subspace b_ker_d = image(q.B, ker_d, tol, scale);
  const Subspace seed = subspace_intersection(V, b_ker_d, tol);
  return krylov_subspace(q.A + q.B * F, seed.basis(), tol, 1.0);
}

Subspace r0x(const PopovTriple& sigma, const Matrix& X, double tol) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  if (!c.verified()) {
    std::ostringstream os;
    os << "r0x: X does not solve CGCARE (status " << to_string(c.status) << ")";
    throw DomainError(os.str());
  }
  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const InputSplit split = input_split(sigma, tol);
  const Matrix bg = sigma.B * split.G;
  const double ref = std::max(1.0, sigma.B.norm());
  const Subspace via_ax = reachable_subspace(d.A_X, bg, tol, ref);
  const Matrix F = sigma.A - sigma.B * pinv(sigma.R, tol) * sigma.S.transpose();
  const Subspace via_f = reachable_subspace(F, bg, tol, ref);
  if (!subspace_equal(via_ax, via_f, tol)) {
    std::ostringstream os;
    os << "<A_X | im BG> (dim " << via_ax.dim() << ") and <F | im BG> (dim " << via_f.dim()
       << ") differ, gap " << subspace_gap(via_ax, via_f);
    throw InternalConsistencyError(os.str());
  }
  return via_ax;
}

KernelOutputNullingReport check_kernel_output_nulling(const PopovTriple& sigma, const Matrix& X, double tol) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  KernelOutputNullingReport out;
  out.solves_gcare = c.status == VerificationStatus::kCgcare || c.status == VerificationStatus::kGcareOnly;
  if (!out.solves_gcare) out.warnings.push_back("X does not solve GCARE; the inclusions need not hold");

  const double ref = 1.0 + sigma.pi_norm();
  const RankFactorization rf = rank_factor(X, tol, ref);
  out.ker_X = rf.null_space;
  for (Index i = 0; i < rf.singular_values.size(); ++i) {
    const double s = rf.singular_values(i);
    if (s > 1e-2 * rf.threshold && s < 1e2 * rf.threshold) {
      std::ostringstream os;
      os << "singular value " << s << " of X is within two decades of the rank threshold " << rf.threshold
         << "; dim ker X is tolerance-sensitive";
      out.warnings.push_back(os.str());
    }
  }

  const DerivedMatrices d = derived_matrices(sigma, X, tol);
  const Quadruple q{sigma.A, sigma.B, d.factor.C, d.factor.D};
  const Matrix& P = out.ker_X.basis();
  out.threshold = tol * (1.0 + d.A_X.norm() + d.C_X.norm() + sigma.pi_norm());
  if (out.ker_X.dim() > 0) {
    out.invariance_defect = (d.A_X * P - P * (P.transpose() * d.A_X * P)).norm();
    out.nulling_defect = (d.C_X * P).norm();
  }
  out.friend_is_minus_KX = out.invariance_defect <= out.threshold && out.nulling_defect <= out.threshold;
  if (out.ker_X.dim() == 0) {
    out.is_output_nulling = true;
  } else {
    const InvarianceSolution s = solve_invariance(q, P, tol);
    out.is_output_nulling = s.defect <= s.threshold;
  }
  return out;
}

}  // namespace riccati_geom
