#include "riccati_geom/popov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

double min_sym_eig(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

// Largest-magnitude entry of every column made positive.
void orient_columns(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index i = 0;
    m.col(j).cwiseAbs().maxCoeff(&i);
    if (m(i, j) < 0.0) m.col(j) *= -1.0;
  }
}

}  // namespace

Matrix PopovTriple::pi() const {
  Matrix p(n() + m(), n() + m());
  p << Q, S, S.transpose(), R;
  return p;
}

Matrix InputSplit::T() const {
  Matrix t(T1.rows(), T1.cols() + T2.cols());
  t << T1, T2;
  return t;
}

void validate(const PopovTriple& sigma, double tol) {
  const Index n = sigma.A.rows();
  const Index m = sigma.B.cols();
  require_shape(sigma.A, n, n, "A");
  require_shape(sigma.B, n, m, "B");
  require_shape(sigma.Q, n, n, "Q");
  require_shape(sigma.S, n, m, "S");
  require_shape(sigma.R, m, m, "R");
  require_finite(sigma.A, "A");
  require_finite(sigma.B, "B");
  require_finite(sigma.Q, "Q");
  require_finite(sigma.S, "S");
  require_finite(sigma.R, "R");
  require_symmetric(sigma.Q, tol, "Q");
  require_symmetric(sigma.R, tol, "R");
}

PopovCheck check_popov(const PopovTriple& sigma, double tol) {
  validate(sigma, tol);
  PopovCheck out;
  const Matrix pi = sigma.pi();
  const double scale = spectral_norm(pi);
  out.threshold = tol * scale;
  const double band = -out.threshold;

  out.pi_min_eig = min_sym_eig(pi);
  out.psd = out.pi_min_eig >= band;

  const Matrix r_pinv = pinv(sigma.R, tol);
  const Matrix q_pinv = pinv(sigma.Q, tol);

  out.R_min_eig = min_sym_eig(sigma.R);
  out.R_psd = out.R_min_eig >= band;
  const Subspace ker_r = rank_factor(sigma.R, tol).null_space;
  out.kerR_defect = ker_r.dim() == 0 ? 0.0 : (sigma.S * ker_r.basis()).norm();
  out.kerR_in_kerS = out.kerR_defect <= out.threshold;
  out.schur_primal_min_eig = min_sym_eig(sigma.Q - sigma.S * r_pinv * sigma.S.transpose());
  out.schur_primal_psd = out.schur_primal_min_eig >= band;

  out.Q_min_eig = min_sym_eig(sigma.Q);
  out.Q_psd = out.Q_min_eig >= band;
  const Subspace ker_q = rank_factor(sigma.Q, tol).null_space;
  out.kerQ_defect = ker_q.dim() == 0 ? 0.0 : (sigma.S.transpose() * ker_q.basis()).norm();
  out.kerQ_in_kerST = out.kerQ_defect <= out.threshold;
  out.schur_dual_min_eig = min_sym_eig(sigma.R - sigma.S.transpose() * q_pinv * sigma.S);
  out.schur_dual_psd = out.schur_dual_min_eig >= band;

  out.identity_defect = std::max((sigma.S * r_pinv * sigma.R - sigma.S).norm(),
                                 (sigma.S.transpose() * q_pinv * sigma.Q - sigma.S.transpose()).norm());
  out.identities = out.identity_defect <= out.threshold;
  return out;
}

OutputFactorization factor_popov(const PopovTriple& sigma, double tol) {
  validate(sigma, tol);
  const Index n = sigma.n();
  const Index m = sigma.m();
  const PsdDecomposition d = psd_decompose(sigma.pi(), tol, "Pi");
  // Keep eigenpairs above the threshold, largest first.
  Matrix rows(d.rank, n + m);
  Index k = 0;
  for (Index i = d.eigenvalues.size() - 1; i >= 0 && k < d.rank; --i) {
    if (d.eigenvalues(i) <= d.threshold) break;
    rows.row(k++) = std::sqrt(d.eigenvalues(i)) * d.eigenvectors.col(i).transpose();
  }
  return {rows.leftCols(n), rows.rightCols(m)};
}

CMatrix popov_function(const PopovTriple& sigma, Complex s, const std::optional<Matrix>& x, double tol) {
  validate(sigma, tol);
  const Index n = sigma.n();
  const Spectrum spec = eig(sigma.A);
  const double pole_tol = tol * (1.0 + sigma.A.norm());
  for (const Complex& lambda : spec.values()) {
    if (std::abs(s - lambda) <= pole_tol || std::abs(s + lambda) <= pole_tol) {
      std::ostringstream os;
      os << "Popov function has a pole at s = " << s << " (eigenvalue " << lambda << " of A)";
      throw PoleError(os.str());
    }
  }
  Matrix q = sigma.Q;
  Matrix sx = sigma.S;
  if (x) {
    require_shape(*x, n, n, "X");
    require_symmetric(*x, tol, "X");
    q = sigma.Q + sigma.A.transpose() * *x + *x * sigma.A;
    sx = sigma.S + *x * sigma.B;
  }
  const CMatrix eye = CMatrix::Identity(n, n);
  const CMatrix bc = sigma.B.cast<Complex>();
  // right = (sI - A)^{-1} B, left^T = (-sI - A)^{-1} B so that
  // B^T (-sI - A^T)^{-1} = left^T (plain transpose).
  const CMatrix right = (s * eye - sigma.A.cast<Complex>()).partialPivLu().solve(bc);
  const CMatrix left = (-s * eye - sigma.A.cast<Complex>()).partialPivLu().solve(bc);
  const CMatrix qc = q.cast<Complex>();
  const CMatrix sc = sx.cast<Complex>();
  return left.transpose() * qc * right + left.transpose() * sc + sc.transpose() * right +
         sigma.R.cast<Complex>();
}

InputSplit input_split(const PopovTriple& sigma, double tol) {
  validate(sigma, tol);
  const Index m = sigma.m();
  const PsdDecomposition d = psd_decompose(sigma.R, tol, "R");
  InputSplit out;
  out.m1 = d.rank;
  out.m2 = m - d.rank;
  // psd_decompose sorts ascending: kernel directions first.
  Matrix t1 = d.eigenvectors.rightCols(out.m1);
  Matrix t2 = d.eigenvectors.leftCols(out.m2);
  out.T1 = Subspace::from_orthonormal(t1).basis();
  out.T2 = Subspace::from_orthonormal(t2).basis();
  orient_columns(out.T1);
  orient_columns(out.T2);
  out.G = out.T2 * out.T2.transpose();
  out.B1 = sigma.B * out.T1;
  out.B2 = sigma.B * out.T2;
  out.R0 = out.T1.transpose() * sigma.R * out.T1;
  out.R0 = 0.5 * (out.R0 + out.R0.transpose());
  return out;
}

std::vector<Complex> sample_points(const Matrix& a, std::size_t count, std::uint64_t seed) {
  const Spectrum spec = eig(a);
  double radius = 0.0;
  for (const auto& v : spec.values()) radius = std::max(radius, std::abs(v));
  const double box = 2.0 * (1.0 + radius);
  const double keep_out = 0.1 * (1.0 + radius);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box, box);
  std::vector<Complex> out;
  out.reserve(count);
  while (out.size() < count) {
    const Complex s(coord(rng), coord(rng));
    bool ok = true;
    for (const auto& v : spec.values()) {
      if (std::abs(s - v) < keep_out || std::abs(s + v) < keep_out) ok = false;
    }
    if (ok) out.push_back(s);
  }
  return out;
}

}  // namespace riccati_geom
