#include <gtest/gtest.h>

#include "examples.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "riccati_geom/cgcare.hpp"
#include "riccati_geom/errors.hpp"

using namespace riccati_geom;
using namespace riccati_geom::testing;

TEST(Derived, FirstExample) {
  const DerivedMatrices d = derived_matrices(example1(), example1_X());
  Matrix sx(2, 2);
  sx << 0, 7, 0, 0;
  Matrix kx(2, 2);
  kx << 0, 0, 1.75, 0;
  Matrix ax(2, 2);
  ax << 8.25, 0, 9, 6;
  EXPECT_LE((d.S_X - sx).norm(), 1e-14);
  EXPECT_LE((d.K_X - kx).norm(), 1e-14);
  EXPECT_LE((d.A_X - ax).cwiseAbs().maxCoeff(), 1e-12);
  // Q0X = C_X^T C_X = diag(33/2, 0).
  EXPECT_NEAR(d.Q0X(0, 0), 16.5, 1e-12);
  EXPECT_LE((d.C_X.transpose() * d.C_X - d.Q0X).norm(), 1e-10);
}

TEST(Derived, ZeroXReducesToData) {
  const PopovTriple s = example3();
  const DerivedMatrices d = derived_matrices(s, Matrix::Zero(3, 3));
  EXPECT_LE((d.Q_X - s.Q).norm(), 1e-15);
  EXPECT_LE((d.S_X - s.S).norm(), 1e-15);
  EXPECT_LE((d.A_X - (s.A - s.B * pinv(s.R) * s.S.transpose())).norm(), 1e-14);
}

TEST(Derived, SecondExampleKeepsA) {
  const DerivedMatrices d = derived_matrices(example2(), example2_X(0.0));
  EXPECT_LE(d.K_X.norm(), 1e-15);
  EXPECT_LE((d.A_X - example2().A).norm(), 1e-15);
}

TEST(Derived, AsymmetricXIsInputError) {
  Matrix x(2, 2);
  x << 0, 1, 0, 0;
  EXPECT_THROW(derived_matrices(example1(), x), InputError);
}

TEST(Residual, ExamplesVanish) {
  EXPECT_LE(gcare_residual(example1(), example1_X()).norm(), 1e-12);
  for (double t : {-2.0, 0.0, 1.0, 3.0}) EXPECT_LE(gcare_residual(example2(), example2_X(t)).norm(), 1e-10);
  PopovTriple zero = example2();
  zero.Q.setZero();
  EXPECT_LE(gcare_residual(zero, Matrix::Zero(2, 2)).norm(), 0.0);
}

TEST(Verify, Statuses) {
  const CandidateSolution c1 = verify_cgcare(example1(), example1_X());
  EXPECT_EQ(c1.status, VerificationStatus::kCgcare);
  EXPECT_LE(c1.residual_norm, 1e-10);
  for (double t : {-2.0, 1.0, 3.0}) {
    EXPECT_EQ(verify_cgcare(example2(), example2_X(t)).status, VerificationStatus::kGcareOnly) << t;
  }
  EXPECT_EQ(verify_cgcare(example2(), example2_X(0.0)).status, VerificationStatus::kCgcare);
  EXPECT_EQ(verify_cgcare(example3(), example3_X0()).status, VerificationStatus::kCgcare);
  EXPECT_EQ(verify_cgcare(example3(), example3_X1()).status, VerificationStatus::kCgcare);
  EXPECT_EQ(verify_cgcare(example1(), Matrix::Identity(2, 2)).status, VerificationStatus::kFailed);
  EXPECT_STREQ(to_string(VerificationStatus::kGcareOnly), "gcare_only");
}

TEST(Verify, ConstraintDefectOfFamily) {
  // X_t B G = t * [3/4; 1] * (-4): the defect grows linearly in t.
  const CandidateSolution c = verify_cgcare(example2(), example2_X(1.0));
  EXPECT_NEAR(c.constraint_defect, 4.0 * std::sqrt(1.0 + 9.0 / 16.0), 1e-12);
}

TEST(SpectralFactor, FirstExampleAtOne) {
  const PopovTriple s = example1();
  // W(s) would hit the pole of A at s = 6 only; s = 1 is fine.
  const CMatrix w1 = spectral_factor_sample(s, example1_X(), Complex(1.0, 0.0));
  const CMatrix wm1 = spectral_factor_sample(s, example1_X(), Complex(-1.0, 0.0));
  EXPECT_LE((wm1.transpose() * w1 - popov_function(s, Complex(1.0, 0.0))).norm(), 1e-8);
}

TEST(SpectralFactor, ConstantWithoutInput) {
  PopovTriple s = example1();
  s.B.setZero();
  s.Q.setZero();
  const CMatrix w = spectral_factor_sample(s, Matrix::Zero(2, 2), Complex(0.3, 0.2));
  Matrix half = Matrix::Zero(2, 2);
  half(1, 1) = 2.0;
  EXPECT_LE((w - half.cast<Complex>()).norm(), 1e-14);
}

TEST(SpectralFactor, RegularCareAtImaginaryPoint) {
  const RegularInstance inst = regular_instance(3);
  PopovTriple s = inst.sigma;
  const Index m = s.m();
  s.R = Matrix::Identity(m, m);
  s.S.setZero();
  Rng rng(3);
  s.Q = random_psd(rng, s.n(), s.n());
  const Matrix x = solve_reduced(s).solution.X;
  const Complex z(0.0, 2.0);
  const CMatrix w = spectral_factor_sample(s, x, z);
  const CMatrix expected = CMatrix::Identity(m, m) + s.B.transpose().cast<Complex>() * x.cast<Complex>() *
                                                         (z * CMatrix::Identity(s.n(), s.n()) - s.A.cast<Complex>()).inverse() *
                                                         s.B.cast<Complex>();
  EXPECT_LE((w - expected).norm(), 1e-9 * (1 + w.norm()));
  const CMatrix wm = spectral_factor_sample(s, x, -z);
  EXPECT_LE((wm.transpose() * w - popov_direct(s, z)).norm(), 1e-8 * (1 + w.squaredNorm()));
}

TEST(SpectralFactor, RequiresVerifiedSolution) {
  EXPECT_THROW(spectral_factor_sample(example2(), example2_X(1.0), Complex(1.0, 0.0)), DomainError);
}

TEST(NormalRank, Examples) {
  EXPECT_EQ(normal_rank_popov(example1(), example1_X()), 1);
  EXPECT_EQ(normal_rank_popov(example2(), example2_X(0.0)), 0);
  const RegularInstance reg = regular_instance(5);
  EXPECT_EQ(normal_rank_popov(reg.sigma, reg.X), reg.sigma.m());
}

TEST(SpectralFactor, PropertyOnRandomSingularInstances) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SingularInstance inst = singular_instance(seed);
    const PopovTriple& s = inst.sigma;
    EXPECT_EQ(normal_rank_popov(s, inst.X), numerical_rank(s.R)) << "seed " << seed;
    for (const Complex& z : sample_points(s.A, 3, seed)) {
      const CMatrix w = spectral_factor_sample(s, inst.X, z);
      const CMatrix wm = spectral_factor_sample(s, inst.X, -z);
      const CMatrix phi = popov_direct(s, z);
      EXPECT_LE((wm.transpose() * w - phi).norm() / std::max(1.0, phi.norm()), 1e-7) << "seed " << seed;
    }
    const DerivedMatrices d = derived_matrices(s, inst.X);
    const Matrix lhs = d.Q_X - d.S_X * pinv(s.R) * d.S_X.transpose();
    EXPECT_LE(lhs.norm() / (1 + s.pi_norm() + inst.X.norm() * s.A.norm()), 1e-7) << "seed " << seed;
    EXPECT_LE((d.C_X.transpose() * d.C_X - d.Q0X).norm() / (1 + d.Q0X.norm()), 1e-7) << "seed " << seed;
  }
}

TEST(SolveReduced, FirstExampleFollowsStableRuleAndTargets) {
  const ReducedSolution stable = solve_reduced(example1());
  EXPECT_TRUE(stable.solution.verified());
  EXPECT_EQ(stable.r, 1);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 17.0 / 49.0;
  EXPECT_LE((stable.solution.X - expected).norm(), 1e-10);
  EXPECT_LE(spectrum_distance(stable.selected, Spectrum({Complex(-8.25, 0)})), 1e-10);

  const ReducedSolution chosen = solve_reduced(example1(), Spectrum({Complex(8.25, 0)}));
  EXPECT_LE((chosen.solution.X - example1_X()).norm(), 1e-10);
}

TEST(SolveReduced, SecondAndThirdExamples) {
  const ReducedSolution two = solve_reduced(example2());
  EXPECT_LE((two.solution.X - example2_X(0.0)).norm(), 1e-12);
  EXPECT_EQ(two.r, 1);
  const ReducedSolution three = solve_reduced(example3());
  EXPECT_LE((three.solution.X - example3_X1()).norm(), 1e-10);
  EXPECT_EQ(three.r, 2);
  const ReducedSolution other = solve_reduced(example3(), Spectrum({Complex(1.0, 0.0)}));
  EXPECT_LE((other.solution.X - example3_X0()).norm(), 1e-10);
}

TEST(SolveReduced, TargetErrors) {
  EXPECT_THROW(solve_reduced(example1(), Spectrum({Complex(1.0, 0)})), InputError);
  EXPECT_THROW(solve_reduced(example1(), Spectrum({Complex(8.25, 0), Complex(-8.25, 0)})), InputError);
  EXPECT_THROW(solve_reduced(example2(), Spectrum({Complex(8.0, 0)})), InputError);
}

TEST(SolveReduced, UnsupportedWhenWeightLeaksIntoR0) {
  PopovTriple s = example2();
  s.Q = Matrix::Identity(2, 2) * 16.0;  // Q0 does not vanish on span{e2}
  EXPECT_THROW(solve_reduced(s), UnsupportedInstanceError);
}

TEST(SolveReduced, ImaginaryAxisReported) {
  // Undamped oscillator with no input and no weight: reduced Lyapunov map on the axis.
  PopovTriple s;
  s.A.resize(2, 2);
  s.A << 0, 1, -1, 0;
  s.B = Matrix::Zero(2, 1);
  s.Q = Matrix::Zero(2, 2);
  s.S = Matrix::Zero(2, 1);
  s.R = Matrix::Ones(1, 1);
  EXPECT_THROW(solve_reduced(s), NoStabilizingSolutionError);
}

TEST(SolveReduced, RegularCaseMatchesEigenvectorOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RegularInstance inst = regular_instance(seed);
    const Matrix ref = care_by_eigenvectors(inst.sigma);
    EXPECT_LE((inst.X - ref).norm() / std::max(1.0, ref.norm()), 1e-8) << "seed " << seed;
    EXPECT_LE(gcare_residual(inst.sigma, inst.X).norm(), 1e-8 * (1 + inst.sigma.pi_norm() + inst.X.norm() * inst.sigma.A.norm()));
    EXPECT_LT(eig(derived_matrices(inst.sigma, inst.X).A_X).max_real(), 0.0);
  }
}

TEST(SolveReduced, SingularInstancesVerify) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SingularInstance inst = singular_instance(seed);
    const CandidateSolution c = verify_cgcare(inst.sigma, inst.X);
    EXPECT_TRUE(c.verified()) << "seed " << seed;
  }
}
