#include "oracles.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace riccati_geom::testing {

Matrix kron_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Index p = a.rows();
  const Index q = b.rows();
  Matrix k = Matrix::Zero(p * q, p * q);
  // vec(AX) = (I kron A) vec X, vec(XB) = (B^T kron I) vec X.
  for (Index j = 0; j < q; ++j) {
    k.block(j * p, j * p, p, p) += a;
    for (Index l = 0; l < q; ++l) {
      k.block(j * p, l * p, p, p) += b(l, j) * Matrix::Identity(p, p);
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(c.data(), p * q);
  const Vector x = k.fullPivLu().solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), p, q);
}

Matrix kron_lyapunov(const Matrix& a, const Matrix& q) { return kron_sylvester(a.transpose(), a, q); }

double moore_penrose_defect(const Matrix& m, const Matrix& p) {
  const double scale = std::max({1.0, m.norm(), p.norm()});
  const Matrix mp = m * p;
  const Matrix pm = p * m;
  const double d = std::max({(m * p * m - m).norm(), (p * m * p - p).norm(), (mp - mp.transpose()).norm(),
                             (pm - pm.transpose()).norm()});
  return d / scale;
}

Matrix care_by_eigenvectors(const PopovTriple& sigma) {
  const Index n = sigma.A.rows();
  const Matrix rinv = sigma.R.inverse();
  const Matrix f = sigma.A - sigma.B * rinv * sigma.S.transpose();
  Matrix h(2 * n, 2 * n);
  h << f, -sigma.B * rinv * sigma.B.transpose(), -(sigma.Q - sigma.S * rinv * sigma.S.transpose()), -f.transpose();
  Eigen::ComplexEigenSolver<CMatrix> es(h.cast<Complex>());
  CMatrix u(2 * n, n);
  Index k = 0;
  for (Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0 && k < n) u.col(k++) = es.eigenvectors().col(i);
  }
  const CMatrix x = u.bottomRows(n) * u.topRows(n).inverse();
  const Matrix xr = x.real();
  return 0.5 * (xr + xr.transpose());
}

CMatrix popov_direct(const PopovTriple& sigma, Complex s, const std::optional<Matrix>& x) {
  const Index n = sigma.A.rows();
  Matrix q = sigma.Q;
  Matrix sm = sigma.S;
  if (x) {
    q += sigma.A.transpose() * *x + *x * sigma.A;
    sm += *x * sigma.B;
  }
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix right = (s * id - sigma.A.cast<Complex>()).inverse() * sigma.B.cast<Complex>();
  const CMatrix left = sigma.B.transpose().cast<Complex>() * (-s * id - sigma.A.transpose().cast<Complex>()).inverse();
  CMatrix out = left * q.cast<Complex>() * right;
  out += left * sm.cast<Complex>();
  out += sm.transpose().cast<Complex>() * right;
  out += sigma.R.cast<Complex>();
  return out;
}

Index plain_rank(const CMatrix& m, double rtol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double cut = std::max(rtol * sv(0), 1e-300);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) r += sv(i) > cut ? 1 : 0;
  return r;
}

Matrix span_projector(const Matrix& m, double rtol) {
  const Index n = m.rows();
  if (m.cols() == 0) return Matrix::Zero(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) r += sv(i) > rtol * std::max(sv(0), 1.0) ? 1 : 0;
  const Matrix u = svd.matrixU().leftCols(r);
  return u * u.transpose();
}

Matrix controllability_projector(const Matrix& a, const Matrix& b, double rtol) {
  const Index n = a.rows();
  Matrix k(n, n * b.cols());
  Matrix blk = b;
  for (Index i = 0; i < n; ++i) {
    k.middleCols(i * b.cols(), b.cols()) = blk;
    blk = a * blk;
  }
  return span_projector(k, rtol);
}

Matrix expm_taylor(const Matrix& m) {
  const double norm = m.lpNorm<Eigen::Infinity>();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix a = m / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace riccati_geom::testing
