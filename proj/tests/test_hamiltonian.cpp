#include <gtest/gtest.h>

#include "examples.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "riccati_geom/errors.hpp"
#include "riccati_geom/geometry.hpp"
#include "riccati_geom/hamiltonian.hpp"

using namespace riccati_geom;
using namespace riccati_geom::testing;

namespace {

// Rosenbrock pencil of the Hamiltonian system for example 1 after the
// feedback / similarity / injection chain, as displayed with the example.
CMatrix example1_pencil(Complex s) {
  CMatrix p = CMatrix::Zero(6, 6);
  p(0, 0) = 33.0 / 4.0 - s;
  p(0, 5) = -7.0;
  p(1, 0) = 9.0;
  p(1, 1) = 6.0 - s;
  p(1, 4) = 2.0;
  p(1, 5) = -4.0;
  p(2, 2) = -33.0 / 4.0 - s;
  p(2, 3) = -9.0;
  p(3, 3) = -6.0 - s;
  p(4, 3) = 2.0;
  p(5, 2) = -7.0;
  p(5, 3) = -4.0;
  p(5, 5) = 4.0;
  return p;
}

// The block form displayed for the same example.
CMatrix example1_block_form(Complex s) {
  CMatrix p = CMatrix::Zero(6, 6);
  p(0, 0) = 6.0 - s;
  p(0, 1) = 2.0;
  p(0, 3) = 9.0;
  p(0, 5) = -4.0;
  p(1, 2) = -6.0 - s;
  p(2, 2) = 2.0;
  p(3, 3) = 33.0 / 4.0 - s;
  p(3, 5) = -7.0;
  p(4, 2) = -9.0;
  p(4, 4) = -(33.0 / 4.0 + s);
  p(5, 2) = -4.0;
  p(5, 4) = -7.0;
  p(5, 5) = 4.0;
  return p;
}

// Finite zeros of a quadruple by brute force: candidates where the plain-SVD
// rank drops below the normal rank, among the given points.
std::vector<Complex> drops(const Quadruple& q, const std::vector<Complex>& points, Index normal) {
  std::vector<Complex> out;
  for (const Complex& s : points) {
    if (plain_rank(rosenbrock_matrix(q, s), 1e-9) < normal) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(BuildHamiltonian, Blocks) {
  PopovTriple s = example1();
  const HamiltonianSystem h = build_hamiltonian(s);
  EXPECT_LE((h.Ahat.topLeftCorner(2, 2) - s.A).norm(), 0.0);
  EXPECT_LE((h.Ahat.bottomRightCorner(2, 2) + s.A.transpose()).norm(), 0.0);
  EXPECT_EQ(h.Ahat(2, 0), -17.0 / 4.0);
  EXPECT_LE(h.Ahat.topRightCorner(2, 2).norm(), 0.0);

  s.Q.setZero();
  const HamiltonianSystem h0 = build_hamiltonian(s);
  EXPECT_LE(h0.Ahat.bottomLeftCorner(2, 2).norm(), 0.0);

  const HamiltonianSystem h2 = build_hamiltonian(example2());
  Matrix chat(1, 4);
  chat << 0, 0, 0, -4;
  EXPECT_LE((h2.Chat - chat).norm(), 0.0);
  EXPECT_LE(h2.Dhat.norm(), 0.0);
  Matrix bhat(4, 1);
  bhat << 0, -4, 0, 0;
  EXPECT_LE((h2.Bhat - bhat).norm(), 0.0);
}

TEST(Rosenbrock, FirstExampleRanks) {
  const Quadruple q = build_hamiltonian(example1()).quadruple();
  EXPECT_EQ(rosenbrock_rank(q, Complex(33.0 / 4.0, 0)), 4);
  EXPECT_EQ(rosenbrock_rank(q, Complex(-33.0 / 4.0, 0)), 4);
  EXPECT_EQ(rosenbrock_rank(q, Complex(6.0, 0)), 5);
  EXPECT_EQ(rosenbrock_rank(q, Complex(-6.0, 0)), 5);
  EXPECT_EQ(rosenbrock_normal_rank(q), 5);
}

TEST(Pencil, FirstExampleMatchesDisplayedMatrix) {
  for (Complex s : {Complex(0.0, 0.0), Complex(0.5, -1.0), Complex(33.0 / 4.0, 0.0), Complex(-6.0, 0.0)}) {
    EXPECT_LE((hamiltonian_pencil(example1(), example1_X(), s) - example1_pencil(s)).norm(), 1e-12);
  }
  EXPECT_EQ(numerical_rank(hamiltonian_pencil(example1(), example1_X(), Complex(33.0 / 4.0, 0))), 4);
  EXPECT_EQ(numerical_rank(hamiltonian_pencil(example1(), example1_X(), Complex(6.0, 0))), 5);
}

TEST(Pencil, ZeroSolutionUsesFeedbackFreeMatrix) {
  const PopovTriple s = example3();
  const Complex z(0.3, 0.7);
  const CMatrix p = hamiltonian_pencil(s, example3_X0(), z);
  const Matrix ax = s.A - s.B * pinv(s.R) * s.S.transpose();
  EXPECT_LE((p.topLeftCorner(3, 3) - (ax.cast<Complex>() - z * CMatrix::Identity(3, 3))).norm(), 1e-14);
  EXPECT_THROW(hamiltonian_pencil(example2(), example2_X(1.0), z), DomainError);
}

TEST(Decompose, FirstExample) {
  const PencilDecomposition pd = pencil_decompose(example1(), example1_X());
  EXPECT_EQ(pd.r, 1);
  EXPECT_EQ(pd.m1, 1);
  EXPECT_EQ(pd.m2, 1);
  ASSERT_EQ(pd.gamma().rows(), 1);
  EXPECT_NEAR(pd.gamma()(0, 0), 33.0 / 4.0, 1e-12);
  EXPECT_EQ(pd.normal_rank, 5);
  EXPECT_EQ(pd.infinite_multiplicity, 1);
  EXPECT_LE(spectrum_distance(pd.finite_zeros, Spectrum({Complex(8.25, 0), Complex(-8.25, 0)})), 1e-12);
  for (Complex s : {Complex(0.0, 0.0), Complex(1.5, 2.0), Complex(-3.0, 0.0)}) {
    EXPECT_LE((pd.block_form(s) - example1_block_form(s)).norm(), 1e-12);
    const CMatrix t = pd.U_X.cast<Complex>() * hamiltonian_pencil(example1(), example1_X(), s) * pd.V_X.cast<Complex>();
    EXPECT_LE((t - pd.block_form(s)).norm(), 1e-12);
  }
}

TEST(Decompose, SecondExampleAndRegular) {
  const PencilDecomposition pd = pencil_decompose(example2(), example2_X(0.0));
  EXPECT_EQ(pd.m1, 0);
  EXPECT_EQ(pd.r, 1);
  EXPECT_NEAR(pd.gamma()(0, 0), -8.0, 1e-12);
  EXPECT_LE(spectrum_distance(pd.finite_zeros, Spectrum({Complex(8, 0), Complex(-8, 0)})), 1e-12);

  const RegularInstance reg = regular_instance(2);
  const PencilDecomposition pr = pencil_decompose(reg.sigma, reg.X);
  EXPECT_EQ(pr.r, 0);
  const Matrix ax = derived_matrices(reg.sigma, reg.X).A_X;
  EXPECT_LE(spectrum_distance(eig(pr.gamma()), eig(ax)), 1e-9);
  EXPECT_LE(spectrum_distance(pr.finite_zeros, eig(ax).merged(eig(ax).mirrored())), 1e-9);
}

TEST(Zeros, Examples) {
  EXPECT_LE(spectrum_distance(invariant_zeros(example1(), example1_X()),
                              Spectrum({Complex(8.25, 0), Complex(-8.25, 0)})),
            1e-12);
  // Both solutions of the third example give the same zeros.
  const Spectrum z0 = invariant_zeros(example3(), example3_X0());
  const Spectrum z1 = invariant_zeros(example3(), example3_X1());
  EXPECT_LE(spectrum_distance(z0, z1), 1e-10);
  EXPECT_LE(spectrum_distance(z0, Spectrum({Complex(1, 0), Complex(-1, 0)})), 1e-10);
}

TEST(ConfirmRankDrop, GenuineAndSpurious) {
  const auto f = [](Complex s) { return hamiltonian_pencil(example1(), example1_X(), s); };
  const RankDrop genuine = confirm_rank_drop(f, Complex(8.25, 0), 5);
  EXPECT_TRUE(genuine.genuine);
  EXPECT_EQ(genuine.at_center, 4);
  EXPECT_EQ(genuine.min_perturbed, 5);
  const RankDrop none = confirm_rank_drop(f, Complex(6.0, 0), 5);
  EXPECT_FALSE(none.genuine);
  EXPECT_EQ(none.at_center, 5);
}

TEST(Properties, RandomSingularInstances) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SingularInstance inst = singular_instance(seed);
    const PopovTriple& s = inst.sigma;
    const Index n = s.n();
    const PencilDecomposition pd = pencil_decompose(s, inst.X);
    EXPECT_EQ(pd.normal_rank, 2 * n + inst.m1) << "seed " << seed;
    EXPECT_EQ(pd.infinite_multiplicity, inst.m1) << "seed " << seed;
    EXPECT_EQ(pd.r, r0x(s, inst.X).dim()) << "seed " << seed;
    EXPECT_EQ(krylov_subspace(pd.A_X11, pd.B21).dim(), pd.r) << "seed " << seed;
    if (pd.m1 > 0) {
      EXPECT_GT(std::abs(pd.R0.determinant()), 1e-12);
    }

    const Spectrum zeros = invariant_zeros(s, inst.X);
    EXPECT_LE(spectrum_distance(zeros, zeros.mirrored()), 1e-8 * (1 + s.A.norm())) << "seed " << seed;
    EXPECT_EQ(static_cast<Index>(zeros.size()), 2 * (n - pd.r));

    // Gamma's spectrum is A_X's minus the eigenvalues on R0.
    const Matrix ax = derived_matrices(s, inst.X).A_X;
    EXPECT_LE(spectrum_distance(eig(pd.A_X11).merged(eig(pd.gamma())), eig(ax)), 1e-7 * (1 + ax.norm()));

    // Pencil ranks agree with the Hamiltonian Rosenbrock ranks.
    const Quadruple ham = build_hamiltonian(s).quadruple();
    EXPECT_EQ(rosenbrock_normal_rank(ham), pd.normal_rank) << "seed " << seed;
    for (const Complex& z : sample_points(ax, 5, seed)) {
      const CMatrix p = hamiltonian_pencil(s, inst.X, z);
      EXPECT_EQ(numerical_rank(p), rosenbrock_rank(ham, z)) << "seed " << seed;
      const CMatrix t = pd.U_X.cast<Complex>() * p * pd.V_X.cast<Complex>();
      EXPECT_LE((t - pd.block_form(z)).norm() / (1 + p.norm()), 1e-9) << "seed " << seed;
    }
  }
}

TEST(Properties, ZerosAgreeWithBruteForceScan) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SingularInstance inst = singular_instance(seed);
    const Quadruple ham = build_hamiltonian(inst.sigma).quadruple();
    const Spectrum zeros = invariant_zeros(inst.sigma, inst.X);
    const Index normal = plain_rank(rosenbrock_matrix(ham, Complex(0.37, 1.91)), 1e-9);
    std::vector<Complex> grid = zeros.values();
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 40; ++i) grid.emplace_back(u(rng), u(rng));
    const std::vector<Complex> found = drops(ham, grid, normal);
    EXPECT_LE(spectrum_distance(Spectrum(found), zeros), 1e-12) << "seed " << seed;
  }
}

TEST(Properties, ZeroSetInvariantUnderFeedbackInjectionSimilarity) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SingularInstance inst = singular_instance(seed);
    const Quadruple q = build_hamiltonian(inst.sigma).quadruple();
    const Index n = q.A.rows();
    const Index m = q.B.cols();
    const Index p = q.C.rows();
    Rng rng(seed + 99);
    const Matrix f = random_matrix(rng, m, n, 0.5);
    const Matrix g = random_matrix(rng, n, p, 0.5);
    const Matrix t = random_matrix(rng, n, n) + 3.0 * Matrix::Identity(n, n);
    const Matrix ti = t.inverse();
    const Quadruple fb{q.A + q.B * f, q.B, q.C + q.D * f, q.D};
    const Quadruple inj{q.A + g * q.C, q.B + g * q.D, q.C, q.D};
    const Quadruple sim{ti * q.A * t, ti * q.B, q.C * t, q.D};

    const Index normal = rosenbrock_normal_rank(q);
    std::vector<Complex> grid = invariant_zeros(inst.sigma, inst.X).values();
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 10; ++i) grid.emplace_back(u(rng), u(rng));
    const Spectrum base(drops(q, grid, normal));
    for (const Quadruple* other : {&fb, &inj, &sim}) {
      EXPECT_EQ(rosenbrock_normal_rank(*other), normal) << "seed " << seed;
      EXPECT_LE(spectrum_distance(Spectrum(drops(*other, grid, normal)), base), 1e-12) << "seed " << seed;
    }
  }
}

TEST(Properties, RegularCaseRecoversMirroredClosedLoop) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RegularInstance inst = regular_instance(seed);
    const Matrix ax = derived_matrices(inst.sigma, inst.X).A_X;
    const Spectrum expected = eig(ax).merged(eig(ax).mirrored());
    EXPECT_LE(spectrum_distance(invariant_zeros(inst.sigma, inst.X), expected), 1e-8 * (1 + ax.norm()));
  }
}
