#include "riccati_geom/cgcare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riccati_geom/errors.hpp"

namespace riccati_geom {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

std::string format_values(const std::vector<Complex>& v) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i].real();
    if (v[i].imag() != 0.0) os << (v[i].imag() < 0 ? "-" : "+") << std::abs(v[i].imag()) << "i";
  }
  os << "}";
  return os.str();
}

void require_candidate(const PopovTriple& sigma, const Matrix& X, double tol) {
  validate(sigma, tol);
  require_shape(X, sigma.n(), sigma.n(), "X");
  require_finite(X, "X");
  require_symmetric(X, tol, "X");
}

void require_verified(const PopovTriple& sigma, const Matrix& X, double tol, const char* op) {
  const CandidateSolution c = verify_cgcare(sigma, X, tol);
  if (!c.verified()) {
    std::ostringstream os;
    os << op << ": X does not solve CGCARE (status " << to_string(c.status)
       << ", residual " << c.residual_norm << ", constraint defect " << c.constraint_defect
       << ", threshold " << c.threshold << ")";
    throw DomainError(os.str());
  }
}

// Picks, for every target, the closest eigenvalue not yet taken.
std::vector<bool> match_targets(const CVector& eigs, const Spectrum& targets, double match_tol) {
  std::vector<bool> taken(eigs.size(), false);
  for (const Complex& t : targets.values()) {
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < eigs.size(); ++i) {
      if (taken[i]) continue;
      const double d = std::abs(eigs(i) - t);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best < 0 || best_d > match_tol) {
      std::ostringstream os;
      os << "target " << t << " is not an eigenvalue of the reduced Hamiltonian (nearest at distance "
         << best_d << ")";
      throw InputError(os.str());
    }
    taken[best] = true;
  }
  return taken;
}

}  // namespace

const char* to_string(VerificationStatus status) {
  switch (status) {
    case VerificationStatus::kUnchecked: return "unchecked";
    case VerificationStatus::kGcareOnly: return "gcare_only";
    case VerificationStatus::kCgcare: return "cgcare";
    case VerificationStatus::kFailed: return "failed";
  }
  return "unknown";
}

DerivedMatrices derived_matrices(const PopovTriple& sigma, const Matrix& X, double tol) {
  require_candidate(sigma, X, tol);
  const Index n = sigma.n();
  const Index m = sigma.m();
  const Matrix r_pinv = pinv(sigma.R, tol);
  DerivedMatrices d;
  d.Q_X = sigma.Q + sigma.A.transpose() * X + X * sigma.A;
  d.S_X = sigma.S + X * sigma.B;
  d.K_X = r_pinv * d.S_X.transpose();
  d.A_X = sigma.A - sigma.B * d.K_X;
  d.factor = factor_popov(sigma, tol);
  d.C_X = d.factor.C - d.factor.D * d.K_X;
  d.Q0X = symmetrized(sigma.Q - sigma.S * r_pinv * sigma.S.transpose() +
                      X * sigma.B * r_pinv * sigma.B.transpose() * X);
  d.Pi_X.resize(n + m, n + m);
  d.Pi_X << d.Q_X, d.S_X, d.S_X.transpose(), sigma.R;
  return d;
}

Matrix gcare_residual(const PopovTriple& sigma, const Matrix& X, double tol) {
  validate(sigma, tol);
  require_shape(X, sigma.n(), sigma.n(), "X");
  const Matrix sx = sigma.S + X * sigma.B;
  return X * sigma.A + sigma.A.transpose() * X - sx * pinv(sigma.R, tol) * sx.transpose() + sigma.Q;
}

CandidateSolution verify_cgcare(const PopovTriple& sigma, const Matrix& X, double tol) {
  validate(sigma, tol);
  require_shape(X, sigma.n(), sigma.n(), "X");
  CandidateSolution c;
  c.X = X;
  c.scale = 1.0 + X.norm() * sigma.A.norm() + sigma.pi_norm();
  c.threshold = tol * c.scale;
  if (!X.allFinite()) {
    c.status = VerificationStatus::kFailed;
    c.residual_norm = c.constraint_defect = std::numeric_limits<double>::infinity();
    return c;
  }
  c.asymmetry = (X - X.transpose()).norm();
  c.residual_norm = gcare_residual(sigma, X, tol).norm();
  const InputSplit split = input_split(sigma, tol);
  c.constraint_defect = split.m2 == 0 ? 0.0 : ((sigma.S + X * sigma.B) * split.T2).norm();
  if (c.asymmetry > tol * std::max(1.0, X.norm())) {
    c.status = VerificationStatus::kFailed;
  } else if (c.residual_norm > c.threshold) {
    c.status = VerificationStatus::kFailed;
  } else if (c.constraint_defect > c.threshold) {
    c.status = VerificationStatus::kGcareOnly;
  } else {
    c.status = VerificationStatus::kCgcare;
  }
  return c;
}

CMatrix spectral_factor_sample(const PopovTriple& sigma, const Matrix& X, Complex s, double tol) {
  require_candidate(sigma, X, tol);
  require_verified(sigma, X, tol, "spectral_factor_sample");
  const Index n = sigma.n();
  const Spectrum spec = eig(sigma.A);
  const double pole_tol = tol * (1.0 + sigma.A.norm());
  for (const Complex& lambda : spec.values()) {
    if (std::abs(s - lambda) <= pole_tol) {
      std::ostringstream os;
      os << "W(s) has a pole at s = " << s << " (eigenvalue " << lambda << " of A)";
      throw PoleError(os.str());
    }
  }
  const Matrix r_half = psd_sqrt(sigma.R, tol);
  const Matrix sx = sigma.S + X * sigma.B;
  const Matrix gain = r_half * pinv(sigma.R, tol) * sx.transpose();
  const CMatrix resolvent_b = (s * CMatrix::Identity(n, n) - sigma.A.cast<Complex>())
                                  .partialPivLu()
                                  .solve(sigma.B.cast<Complex>());
  return gain.cast<Complex>() * resolvent_b + r_half.cast<Complex>();
}

Index normal_rank_popov(const PopovTriple& sigma, const Matrix& X, double tol, std::uint64_t seed,
                        std::size_t samples) {
  require_candidate(sigma, X, tol);
  const Index n = sigma.n();
  const double pi_scale = sigma.pi_norm();
  Index best = 0;
  for (const Complex& s : sample_points(sigma.A, samples, seed)) {
    const CMatrix phi = popov_function(sigma, s, std::nullopt, tol);
    const CMatrix eye = CMatrix::Identity(n, n);
    const CMatrix bc = sigma.B.cast<Complex>();
    const double right = (s * eye - sigma.A.cast<Complex>()).partialPivLu().solve(bc).norm();
    const double left = (-s * eye - sigma.A.cast<Complex>()).partialPivLu().solve(bc).norm();
    // Anchor to the size Phi would have for a generic Pi of this norm, so
    // that Phi = 0 identically reads as rank 0.
    const double ref = pi_scale * (1.0 + right) * (1.0 + left);
    best = std::max(best, numerical_rank(phi, tol, ref));
  }
  return best;
}

ReducedSolution solve_reduced(const PopovTriple& sigma, const std::optional<Spectrum>& targets, double tol) {
  validate(sigma, tol);
  const Index n = sigma.n();
  psd_decompose(sigma.pi(), tol, "Pi");

  const InputSplit split = input_split(sigma, tol);
  const Matrix r_pinv = pinv(sigma.R, tol);
  const Matrix F = sigma.A - sigma.B * r_pinv * sigma.S.transpose();
  const Matrix Q0 = symmetrized(sigma.Q - sigma.S * r_pinv * sigma.S.transpose());
  const double scale = 1.0 + sigma.pi_norm() + sigma.A.norm();

  const Subspace r0 = krylov_subspace(F, split.B2, tol, std::max(1.0, sigma.B.norm()));
  const Index r = r0.dim();
  const Index n2 = n - r;
  const Matrix P1 = r0.basis();
  const Matrix P2 = r0.orthogonal_complement().basis();

  ReducedSolution out;
  out.r = r;
  out.adapted_basis.resize(n, n);
  out.adapted_basis << P1, P2;

  // X = diag(0, X22) forces Q0 P1 = 0 through the closed-loop Lyapunov
  // identity restricted to R0.
  if (r > 0) {
    const double leak = (Q0 * P1).norm();
    if (leak > tol * scale) {
      std::ostringstream os;
      os << "Q - S R^+ S^T does not vanish on the subspace <F | im BG> (defect " << leak
         << "); no CGCARE solution annihilating that subspace exists";
      throw UnsupportedInstanceError(os.str());
    }
  }

  Matrix X22 = Matrix::Zero(n2, n2);
  if (n2 > 0) {
    const Matrix F22 = P2.transpose() * F * P2;
    const Matrix Q22 = symmetrized(P2.transpose() * Q0 * P2);
    if (split.m1 == 0) {
      // No input left on the quotient: X22 F22 + F22^T X22 + Q22 = 0.
      out.hamiltonian = eig(F22).merged(eig(F22).mirrored());
      out.selected = eig(F22);
      const double axis_tol = tol * std::max(1.0, F22.norm());
      std::vector<Complex> on_axis;
      for (const Complex& v : out.selected.values()) {
        if (std::abs(v.real()) <= axis_tol) on_axis.push_back(v);
      }
      if (!on_axis.empty()) {
        throw NoStabilizingSolutionError("reduced Lyapunov equation has imaginary-axis eigenvalues " +
                                         format_values(on_axis));
      }
      if (targets && !spectra_match(*targets, out.selected, std::sqrt(tol) * std::max(1.0, F22.norm()))) {
        throw InputError("targets must equal the spectrum of the quotient map when R = 0, which is " +
                         format_values(out.selected.values()));
      }
      X22 = solve_lyapunov(F22, Q22, tol);
    } else {
      const Matrix B12 = P2.transpose() * split.B1;
      const Matrix R0inv = split.R0.inverse();
      Matrix H(2 * n2, 2 * n2);
      H << F22, -B12 * R0inv * B12.transpose(), -Q22, -F22.transpose();
      ComplexSchurForm schur = complex_schur(H);
      const CVector diag = schur.T.diagonal();
      out.hamiltonian = Spectrum(std::vector<Complex>(diag.data(), diag.data() + diag.size()));
      const double h_scale = std::max(1.0, H.norm());

      std::vector<bool> select(diag.size(), false);
      if (targets) {
        if (static_cast<Index>(targets->size()) != n2) {
          std::ostringstream os;
          os << "expected " << n2 << " target eigenvalues, got " << targets->size();
          throw InputError(os.str());
        }
        if (!targets->conjugate_closed(std::sqrt(tol) * h_scale)) {
          throw InputError("targets must be closed under complex conjugation");
        }
        select = match_targets(diag, *targets, std::sqrt(tol) * h_scale);
      } else {
        std::vector<Complex> on_axis;
        for (Index i = 0; i < diag.size(); ++i) {
          if (std::abs(diag(i).real()) <= tol * h_scale) on_axis.push_back(diag(i));
          select[i] = diag(i).real() < 0.0;
        }
        if (!on_axis.empty()) {
          throw NoStabilizingSolutionError("reduced Hamiltonian has imaginary-axis eigenvalues " +
                                           format_values(on_axis));
        }
      }
      const Index k = reorder_schur(schur, select);
      if (k != n2) {
        std::ostringstream os;
        os << "selected " << k << " Hamiltonian eigenvalues, need " << n2;
        throw NumericalError(os.str());
      }
      std::vector<Complex> chosen;
      for (Index i = 0; i < k; ++i) chosen.push_back(schur.T(i, i));
      out.selected = Spectrum(chosen);

      const CMatrix U1 = schur.Z.topLeftCorner(n2, n2);
      const CMatrix U2 = schur.Z.bottomLeftCorner(n2, n2);
      Eigen::JacobiSVD<CMatrix> svd(U1);
      const double smin = svd.singularValues()(n2 - 1);
      if (smin <= std::sqrt(tol)) {
        std::ostringstream os;
        os << "selected invariant subspace is not a graph over the state (sigma_min(U1) = " << smin << ")";
        throw UnsupportedInstanceError(os.str());
      }
      const CMatrix Xc = U2 * U1.inverse();
      const double xn = std::max(1.0, Xc.norm());
      const double imag = Xc.imag().norm();
      const double asym = (Xc.real() - Xc.real().transpose()).norm();
      if (imag > std::sqrt(tol) * xn || asym > std::sqrt(tol) * xn) {
        std::ostringstream os;
        os << "selected eigenvalues do not give a real symmetric solution (imaginary part " << imag
           << ", asymmetry " << asym << ")";
        if (targets) throw InputError(os.str());
        throw NumericalError(os.str());
      }
      X22 = symmetrized(Xc.real());
    }
  }

  Matrix X = n2 > 0 ? Matrix(P2 * X22 * P2.transpose()) : Matrix::Zero(n, n);
  X = symmetrized(X);
  out.solution = verify_cgcare(sigma, X, tol);
  if (!out.solution.verified()) {
    std::ostringstream os;
    os << "reduction produced a candidate that does not verify (status " << to_string(out.solution.status)
       << ", residual " << out.solution.residual_norm << ", constraint defect "
       << out.solution.constraint_defect << ", threshold " << out.solution.threshold << ")";
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace riccati_geom
