#include "riccati_geom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Orthonormal basis of im(q) chosen from the projector q q^T: pivot columns of
// the projector (sorted by index) orthonormalized in order, each vector
// oriented to have positive inner product with its pivot column.
Matrix canonical_basis(const Matrix& q) {
  const Index n = q.rows();
  const Index k = q.cols();
  if (k == 0) return Matrix(n, 0);
  const Matrix p = q * q.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(p);
  std::vector<Index> pivots(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) pivots[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()(j);
  std::sort(pivots.begin(), pivots.end());

  Matrix basis(n, k);
  for (Index j = 0; j < k; ++j) {
    Vector v = p.col(pivots[static_cast<std::size_t>(j)]);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) v -= basis.col(i).dot(v) * basis.col(i);
    }
    const double nv = v.norm();
    if (nv < 1e-12) {
      // Degenerate pivot choice; fall back on the original orthonormal basis.
      return q;
    }
    basis.col(j) = v / nv;
  }
  return basis;
}

}  // namespace

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + " has non-finite entries");
  }
}

void require_shape(const Matrix& m, Index rows, Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(std::string(what) + " must be " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + shape_of(m));
  }
}

void require_symmetric(const Matrix& m, double tol, std::string_view what) {
  if (m.rows() != m.cols()) throw InputError(std::string(what) + " must be square, got " + shape_of(m));
  const double scale = std::max(1.0, m.norm());
  const double defect = (m - m.transpose()).norm();
  if (defect > tol * scale) {
    std::ostringstream os;
    os << what << " is not symmetric (||M - M^T|| = " << defect << ")";
    throw InputError(os.str());
  }
}

// ---------------------------------------------------------------- Spectrum

Spectrum::Spectrum(std::vector<Complex> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

Spectrum Spectrum::mirrored() const {
  std::vector<Complex> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(-v);
  return Spectrum(std::move(out));
}

Spectrum Spectrum::merged(const Spectrum& other) const {
  std::vector<Complex> out = values_;
  out.insert(out.end(), other.values_.begin(), other.values_.end());
  return Spectrum(std::move(out));
}

double Spectrum::max_real() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : values_) best = std::max(best, v.real());
  return best;
}

bool Spectrum::conjugate_closed(double tol) const {
  std::vector<bool> used(values_.size(), false);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(values_[i].imag()) <= tol) continue;
    bool found = false;
    for (std::size_t j = 0; j < values_.size() && !found; ++j) {
      if (!used[j] && std::abs(values_[j] - std::conj(values_[i])) <= tol) {
        used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

double spectrum_distance(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto& av = a.values();
  const auto& bv = b.values();
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(av.size() * bv.size());
  for (std::size_t i = 0; i < av.size(); ++i)
    for (std::size_t j = 0; j < bv.size(); ++j) pairs.push_back({std::abs(av[i] - bv[j]), i, j});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  std::vector<bool> ua(av.size(), false), ub(bv.size(), false);
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& p : pairs) {
    if (ua[p.i] || ub[p.j]) continue;
    ua[p.i] = ub[p.j] = true;
    worst = std::max(worst, p.d);
    if (++matched == av.size()) break;
  }
  return worst;
}

// ---------------------------------------------------------------- Subspace

Subspace::Subspace(Index ambient) : ambient_(ambient), basis_(Matrix(ambient, 0)) {}

Subspace Subspace::full(Index ambient) { return Subspace(ambient, Matrix::Identity(ambient, ambient)); }

Subspace Subspace::from_orthonormal(const Matrix& q) { return Subspace(q.rows(), canonical_basis(q)); }

Subspace Subspace::span(const Matrix& cols, double tol, double ref_scale) {
  return rank_factor(cols, tol, ref_scale).col_space;
}

Subspace Subspace::orthogonal_complement() const {
  if (dim() == 0) return full(ambient_);
  return rank_factor(basis_.transpose()).null_space;
}

// ---------------------------------------------------------------- factorizations

RankFactorization rank_factor(const Matrix& m, double tol, double ref_scale) {
  require_finite(m, "rank_factor input");
  const Index rows = m.rows();
  const Index cols = m.cols();
  RankFactorization out;
  if (rows == 0 || cols == 0) {
    out.rank = 0;
    out.col_space = Subspace(rows);
    out.null_space = Subspace::full(cols);
    out.left_null_space = Subspace::full(rows);
    out.singular_values = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  out.threshold = tol * static_cast<double>(std::max(rows, cols)) * std::max(smax, ref_scale);
  Index r = 0;
  while (r < sv.size() && sv(r) > out.threshold) ++r;
  out.rank = r;
  out.singular_values = sv;
  out.col_space = Subspace::from_orthonormal(svd.matrixU().leftCols(r));
  out.left_null_space = Subspace::from_orthonormal(svd.matrixU().rightCols(rows - r));
  out.null_space = Subspace::from_orthonormal(svd.matrixV().rightCols(cols - r));
  return out;
}

Matrix echelon_null_basis(const Matrix& m, double tol, double ref_scale) {
  const Matrix n = rank_factor(m, tol, ref_scale).null_space.basis();
  const Index k = n.cols();
  if (k == 0) return n;
  std::vector<Index> pivots;
  Matrix picked(0, k);
  for (Index i = n.rows() - 1; i >= 0 && static_cast<Index>(pivots.size()) < k; --i) {
    Matrix trial(picked.rows() + 1, k);
    trial << picked, n.row(i);
    // Rows of an orthonormal basis: anchor the rank test at 1.
    if (numerical_rank(trial, tol, 1.0) == trial.rows()) {
      picked = std::move(trial);
      pivots.push_back(i);
    }
  }
  if (static_cast<Index>(pivots.size()) != k) throw NumericalError("echelon_null_basis: pivot selection failed");
  Matrix h = n * picked.partialPivLu().inverse();
  for (std::size_t j = 0; j < pivots.size(); ++j) {
    for (std::size_t l = 0; l < pivots.size(); ++l) h(pivots[j], l) = (j == l) ? 1.0 : 0.0;
  }
  return h;
}

Index numerical_rank(const Matrix& m, double tol, double ref_scale) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double thr = tol * static_cast<double>(std::max(m.rows(), m.cols())) * std::max(sv(0), ref_scale);
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return r;
}

Index numerical_rank(const CMatrix& m, double tol, double ref_scale) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if (!m.allFinite()) throw InputError("numerical_rank input has non-finite entries");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const Vector sv = svd.singularValues();
  const double thr = tol * static_cast<double>(std::max(m.rows(), m.cols())) * std::max(sv(0), ref_scale);
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;
  return r;
}

Matrix pinv(const Matrix& m, double tol, double ref_scale) {
  require_finite(m, "pinv input");
  if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double thr = tol * static_cast<double>(std::max(m.rows(), m.cols())) * std::max(sv(0), ref_scale);
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Spectrum eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("eig requires a square matrix, got " + shape_of(m));
  require_finite(m, "eig input");
  if (m.rows() == 0) return Spectrum();
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("QR iteration did not converge");
  std::vector<Complex> values(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) values[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return Spectrum(std::move(values));
}

RealSchurForm real_schur(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("real_schur requires a square matrix");
  require_finite(m, "real_schur input");
  if (m.rows() == 0) return {Matrix(0, 0), Matrix(0, 0)};
  Eigen::RealSchur<Matrix> rs(m);
  if (rs.info() != Eigen::Success) throw NumericalError("real Schur iteration did not converge");
  return {rs.matrixT(), rs.matrixU()};
}

ComplexSchurForm complex_schur(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("complex_schur requires a square matrix");
  require_finite(m, "complex_schur input");
  if (m.rows() == 0) return {CMatrix(0, 0), CMatrix(0, 0)};
  Eigen::ComplexSchur<CMatrix> cs(m.cast<Complex>());
  if (cs.info() != Eigen::Success) throw NumericalError("complex Schur iteration did not converge");
  return {cs.matrixT(), cs.matrixU()};
}

Index reorder_schur(ComplexSchurForm& form, std::vector<bool> select) {
  const Index n = form.T.rows();
  if (static_cast<Index>(select.size()) != n) throw InputError("reorder_schur: selection size mismatch");
  Index target = 0;
  for (Index j = 0; j < n; ++j) {
    if (!select[static_cast<std::size_t>(j)]) continue;
    // Bubble entry j up to position `target` with adjacent swaps.
    for (Index k = j - 1; k >= target; --k) {
      const Complex a = form.T(k, k);
      const Complex b = form.T(k + 1, k + 1);
      const Complex c = form.T(k, k + 1);
      // Eigenvector of [[a, c], [0, b]] for b, normalized.
      Eigen::Vector2cd v(c, b - a);
      const double nv = v.norm();
      if (nv == 0.0) {
        std::swap(select[static_cast<std::size_t>(k)], select[static_cast<std::size_t>(k + 1)]);
        continue;
      }
      v /= nv;
      Eigen::Matrix2cd q;
      q << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
      form.T.middleRows(k, 2) = q.adjoint() * form.T.middleRows(k, 2);
      form.T.middleCols(k, 2) = form.T.middleCols(k, 2) * q;
      form.Z.middleCols(k, 2) = form.Z.middleCols(k, 2) * q;
      form.T(k + 1, k) = 0.0;
      std::swap(select[static_cast<std::size_t>(k)], select[static_cast<std::size_t>(k + 1)]);
    }
    ++target;
  }
  return target;
}

Matrix real_basis_of_conjugate_closed(const CMatrix& cols, double tol) {
  const Index n = cols.rows();
  const Index k = cols.cols();
  if (k == 0) return Matrix(n, 0);
  Matrix stacked(n, 2 * k);
  stacked << cols.real(), cols.imag();
  Subspace s = Subspace::span(stacked, tol);
  if (s.dim() != k) {
    throw NumericalError("complex invariant basis is not closed under conjugation (real span has dimension " +
                         std::to_string(s.dim()) + ", expected " + std::to_string(k) + ")");
  }
  return s.basis();
}

// ---------------------------------------------------------------- equations

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c, double tol) {
  if (a.rows() != a.cols()) throw InputError("solve_sylvester: A must be square");
  if (b.rows() != b.cols()) throw InputError("solve_sylvester: B must be square");
  require_shape(c, a.rows(), b.rows(), "solve_sylvester: C");
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");
  const Index n = a.rows();
  const Index m = b.rows();
  if (n == 0 || m == 0) return Matrix::Zero(n, m);

  const ComplexSchurForm sa = complex_schur(a);
  const ComplexSchurForm sb = complex_schur(b);
  const CMatrix f = sa.Z.adjoint() * c.cast<Complex>() * sb.Z;
  const double sep_floor = tol * (a.norm() + b.norm());

  CMatrix y = CMatrix::Zero(n, m);
  for (Index j = 0; j < m; ++j) {
    CVector rhs = -f.col(j);
    for (Index k = 0; k < j; ++k) rhs -= sb.T(k, j) * y.col(k);
    CMatrix lhs = sa.T;
    lhs.diagonal().array() += sb.T(j, j);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(lhs(i, i)) <= sep_floor) {
        std::ostringstream os;
        os << "Sylvester operator is singular: eigenvalue " << sa.T(i, i)
           << " of A is the negative of eigenvalue " << sb.T(j, j) << " of B";
        throw SolvabilityError(os.str());
      }
    }
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (sa.Z * y * sb.Z.adjoint()).real();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q, double tol) {
  Matrix x = solve_sylvester(a.transpose(), a, q, tol);
  return 0.5 * (x + x.transpose());
}

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("expm requires a square matrix");
  require_finite(m, "expm input");
  if (m.rows() == 0) return Matrix(0, 0);
  return m.exp();
}

PsdDecomposition psd_decompose(const Matrix& m, double tol, std::string_view what) {
  require_symmetric(m, std::max(tol, 1e-12), what);
  PsdDecomposition out;
  if (m.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  Vector lambda = es.eigenvalues();
  const double lmax = std::max(0.0, lambda.maxCoeff());
  out.threshold = tol * lmax;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -out.threshold) {
      std::ostringstream os;
      os << what << " is not positive semidefinite (eigenvalue " << lambda(i) << ")";
      throw DomainError(os.str());
    }
    if (lambda(i) < 0.0) lambda(i) = 0.0;
    if (lambda(i) > out.threshold) ++out.rank;
  }
  out.eigenvalues = lambda;
  out.eigenvectors = es.eigenvectors();
  return out;
}

Matrix psd_sqrt(const Matrix& m, double tol) {
  const PsdDecomposition d = psd_decompose(m, tol, "matrix square root argument");
  if (m.rows() == 0) return Matrix(0, 0);
  return d.eigenvectors * d.eigenvalues.cwiseSqrt().asDiagonal() * d.eigenvectors.transpose();
}

// ---------------------------------------------------------------- subspaces

namespace {
void require_same_ambient(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw InputError("subspaces live in different ambient spaces (" + std::to_string(u.ambient_dim()) +
                     " vs " + std::to_string(v.ambient_dim()) + ")");
  }
}
}  // namespace

Subspace subspace_sum(const Subspace& u, const Subspace& v, double tol) {
  require_same_ambient(u, v);
  Matrix cat(u.ambient_dim(), u.dim() + v.dim());
  cat << u.basis(), v.basis();
  return Subspace::span(cat, tol);
}

Subspace subspace_intersection(const Subspace& u, const Subspace& v, double tol) {
  require_same_ambient(u, v);
  if (u.dim() == 0 || v.dim() == 0) return Subspace(u.ambient_dim());
  Matrix cat(u.ambient_dim(), u.dim() + v.dim());
  cat << u.basis(), -v.basis();
  const RankFactorization rf = rank_factor(cat, tol);
  if (rf.null_space.dim() == 0) return Subspace(u.ambient_dim());
  const Matrix coeffs = rf.null_space.basis().topRows(u.dim());
  return Subspace::span(u.basis() * coeffs, tol);
}

bool subspace_contains(const Subspace& u, const Subspace& v, double tol) {
  require_same_ambient(u, v);
  if (v.dim() == 0) return true;
  if (v.dim() > u.dim()) return false;
  Matrix cat(u.ambient_dim(), u.dim() + v.dim());
  cat << u.basis(), v.basis();
  return numerical_rank(cat, tol) == u.dim();
}

bool subspace_equal(const Subspace& u, const Subspace& v, double tol) {
  return u.dim() == v.dim() && subspace_contains(u, v, tol) && subspace_contains(v, u, tol);
}

double subspace_gap(const Subspace& u, const Subspace& v) {
  require_same_ambient(u, v);
  if (u.dim() != v.dim()) return 1.0;
  if (u.dim() == 0) return 0.0;
  const Matrix ru = v.basis() - u.basis() * (u.basis().transpose() * v.basis());
  const Matrix rv = u.basis() - v.basis() * (v.basis().transpose() * u.basis());
  auto norm2 = [](const Matrix& x) {
    return x.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(x).singularValues()(0);
  };
  return std::max(norm2(ru), norm2(rv));
}

SubspaceRelations subspace_ops(const Subspace& u, const Subspace& v, double tol) {
  SubspaceRelations out;
  out.sum = subspace_sum(u, v, tol);
  out.intersection = subspace_intersection(u, v, tol);
  out.contains = subspace_contains(u, v, tol);
  out.equal = out.contains && subspace_contains(v, u, tol) && u.dim() == v.dim();
  return out;
}

Subspace krylov_subspace(const Matrix& a, const Matrix& b, double tol, double ref_scale) {
  if (a.rows() != a.cols()) throw InputError("krylov_subspace: A must be square");
  if (b.rows() != a.rows()) throw InputError("krylov_subspace: B must have as many rows as A");
  Subspace v = Subspace::span(b, tol, ref_scale);
  for (Index step = 0; step < a.rows() && v.dim() > 0 && v.dim() < a.rows(); ++step) {
    Matrix cat(a.rows(), 2 * v.dim());
    cat << v.basis(), a * v.basis();
    Subspace next = Subspace::span(cat, tol);
    if (next.dim() == v.dim()) break;
    v = std::move(next);
  }
  return v;
}

Subspace image(const Matrix& map, const Subspace& v, double tol, double ref_scale) {
  if (map.cols() != v.ambient_dim()) throw InputError("image: map and subspace dimensions differ");
  if (v.dim() == 0) return Subspace(map.rows());
  return Subspace::span(map * v.basis(), tol, ref_scale);
}

}  // namespace riccati_geom
