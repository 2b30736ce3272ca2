#include "generators.hpp"

#include <Eigen/QR>

#include "riccati_geom/errors.hpp"

namespace riccati_geom::testing {

Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  }
  return m;
}

Matrix random_orthogonal(Rng& rng, Index n) {
  if (n == 0) return Matrix(0, 0);
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  Matrix q = qr.householderQ();
  // Fix signs so the distribution does not depend on the QR convention.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix random_psd(Rng& rng, Index n, Index rank) {
  const Matrix w = random_matrix(rng, n, rank);
  return w * w.transpose();
}

Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

namespace {

std::optional<SingularInstance> try_singular(std::uint64_t seed, Index max_n) {
  Rng rng(seed);
  const Index n = uniform_index(rng, 2, max_n);
  const Index r = uniform_index(rng, 1, n - 1);
  const Index n2 = n - r;
  const Index m1 = uniform_index(rng, 0, 2);
  const Index m2 = uniform_index(rng, 1, std::min<Index>(2, r));
  const Index m = m1 + m2;

  Matrix F = random_matrix(rng, n, n);
  F.bottomLeftCorner(n2, r).setZero();
  Matrix Bg = Matrix::Zero(n, m2);
  Bg.topRows(r) = random_matrix(rng, r, m2);
  const Matrix B1 = random_matrix(rng, n, m1);
  const Matrix R1 = random_psd(rng, m1, m1) + Matrix::Identity(m1, m1);
  const Matrix S1 = random_matrix(rng, n, m1, 0.5);
  Matrix Q0 = Matrix::Zero(n, n);
  Q0.bottomRightCorner(n2, n2) = random_psd(rng, n2, uniform_index(rng, 1, n2));

  const Matrix U = random_orthogonal(rng, n);
  const Matrix T = random_orthogonal(rng, m);

  // Adapted coordinates: inputs [u1; u2], u2 spans ker R.
  Matrix Ba(n, m);
  Ba << B1, Bg;
  Matrix Ra = Matrix::Zero(m, m);
  Ra.topLeftCorner(m1, m1) = R1;
  Matrix Sa = Matrix::Zero(n, m);
  Sa.leftCols(m1) = S1;
  const Matrix R1inv = R1.inverse();
  const Matrix Aa = F + B1 * R1inv * S1.transpose();
  const Matrix Qa = Q0 + S1 * R1inv * S1.transpose();

  SingularInstance out;
  out.seed = seed;
  out.r = r;
  out.m1 = m1;
  out.m2 = m2;
  out.sigma.A = U * Aa * U.transpose();
  out.sigma.B = U * Ba * T.transpose();
  out.sigma.Q = U * Qa * U.transpose();
  out.sigma.Q = 0.5 * (out.sigma.Q + out.sigma.Q.transpose()).eval();
  out.sigma.S = U * Sa * T.transpose();
  out.sigma.R = T * Ra * T.transpose();
  out.sigma.R = 0.5 * (out.sigma.R + out.sigma.R.transpose()).eval();
  try {
    const ReducedSolution red = solve_reduced(out.sigma);
    if (red.r != r) return std::nullopt;
    out.X = red.solution.X;
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

SingularInstance singular_instance(std::uint64_t seed, Index max_n) {
  for (std::uint64_t k = 0; k < 64; ++k) {
    if (auto inst = try_singular(seed * 1000003ULL + k, max_n)) return *inst;
  }
  throw NumericalError("no usable singular instance near seed " + std::to_string(seed));
}

RegularInstance regular_instance(std::uint64_t seed, Index max_n) {
  for (std::uint64_t k = 0; k < 64; ++k) {
    Rng rng(seed * 7919ULL + k);
    const Index n = uniform_index(rng, 1, max_n);
    const Index m = uniform_index(rng, 1, 3);
    RegularInstance out;
    out.seed = seed;
    out.sigma.A = random_matrix(rng, n, n);
    out.sigma.B = random_matrix(rng, n, m);
    out.sigma.R = random_psd(rng, m, m) + Matrix::Identity(m, m);
    out.sigma.S = random_matrix(rng, n, m, 0.5);
    out.sigma.Q = random_psd(rng, n, n) + out.sigma.S * out.sigma.R.inverse() * out.sigma.S.transpose();
    out.sigma.Q = 0.5 * (out.sigma.Q + out.sigma.Q.transpose()).eval();
    try {
      out.X = solve_reduced(out.sigma).solution.X;
      return out;
    } catch (const Error&) {
    }
  }
  throw NumericalError("no usable regular instance near seed " + std::to_string(seed));
}

std::optional<Matrix> alternative_solution(const SingularInstance& inst, std::uint64_t seed) {
  ReducedSolution base;
  try {
    base = solve_reduced(inst.sigma);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::vector<Complex> chosen = base.selected.values();
  if (chosen.empty()) return std::nullopt;
  Rng rng(seed);
  const std::size_t k = static_cast<std::size_t>(uniform_index(rng, 0, static_cast<Index>(chosen.size()) - 1));
  const Complex flip = chosen[k];
  // Flip the value and, for a complex one, its conjugate.
  for (Complex& v : chosen) {
    if (std::abs(v - flip) < 1e-9 || std::abs(v - std::conj(flip)) < 1e-9) v = -v;
  }
  try {
    const ReducedSolution alt = solve_reduced(inst.sigma, Spectrum(chosen));
    return alt.solution.X;
  } catch (const Error&) {
    return std::nullopt;
  }
}

Quadruple random_quadruple(Rng& rng, Index n, Index m, Index p) {
  Quadruple q;
  q.A = random_matrix(rng, n, n);
  q.B = random_matrix(rng, n, m);
  q.C = random_matrix(rng, p, n);
  q.D = random_matrix(rng, p, m);
  return q;
}

}  // namespace riccati_geom::testing
