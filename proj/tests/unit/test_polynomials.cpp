#include <gtest/gtest.h>

#include "ktoda/moments.hpp"
#include "ktoda/polynomials.hpp"
#include "support.hpp"

namespace ktoda {
namespace {

using testing::constant_state;
using testing::random_complex_state;

std::vector<Complex> sample_points() {
  std::vector<Complex> pts;
  for (int k = 0; k < 10; ++k) pts.push_back(std::polar(0.3 + 0.07 * k, 0.9 * k));
  return pts;
}

TEST(Polynomial, ArithmeticAndEvaluation) {
  const Polynomial p({1.0, -2.0, 3.0});
  EXPECT_EQ(p.degree(), 2u);
  EXPECT_EQ(p(Complex(2.0)), Complex(9.0));
  EXPECT_EQ(p.coefficient(5), Complex(0.0));
  const Polynomial q = p.shifted(2);
  EXPECT_EQ(q.degree(), 4u);
  EXPECT_EQ(q(Complex(2.0)), Complex(36.0));
  EXPECT_EQ((p - p)(Complex(1.7)), Complex(0.0));
  EXPECT_EQ((Complex(2.0) * p + Polynomial::monomial(3))(Complex(1.0)), Complex(5.0));
}

TEST(ScalarSequence, FirstTermsAndMonicity) {
  const auto s = random_complex_state(1, 10);
  const auto P = scalar_sequence(s, 6);
  ASSERT_EQ(P.size(), 7u);
  EXPECT_EQ(P[0](Complex(0.3)), Complex(1.0));
  EXPECT_EQ(P[1].coefficient(0), -s.a(1));
  EXPECT_EQ(P[1].coefficient(1), Complex(1.0));
  for (std::size_t n = 0; n < P.size(); ++n) {
    EXPECT_EQ(P[n].degree(), n);
    EXPECT_EQ(P[n].coefficient(n), Complex(1.0));
  }
}

TEST(ScalarSequence, ZeroLatticeGivesMonomials) {
  const auto P = scalar_sequence(constant_state(8, 0.0, 0.0, 0.0), 7);
  for (std::size_t n = 0; n < P.size(); ++n)
    for (std::size_t k = 0; k <= n; ++k) EXPECT_EQ(P[n].coefficient(k), Complex(k == n ? 1.0 : 0.0));
}

TEST(ScalarSequence, UnitLatticeHandValues) {
  const auto P = scalar_sequence(constant_state(8, 0.0, 1.0, 1.0), 3);
  EXPECT_EQ(P[2].coefficients(), (std::vector<Complex>{-1.0, 0.0, 1.0}));
  EXPECT_EQ(P[3].coefficients(), (std::vector<Complex>{-1.0, -2.0, 0.0, 1.0}));
}

TEST(ScalarSequence, CharacteristicPolynomialAtFullDegree) {
  // P_m is det(zI - J) for the finite truncation
  const auto s = random_complex_state(5, 6);
  const auto P = scalar_sequence(s, 6);
  const DenseMatrix J = BandedOperator(s).dense();
  for (Complex z : sample_points()) {
    const Complex det = (z * DenseMatrix::Identity(6, 6) - J).determinant();
    EXPECT_LT(std::abs(P[6](z) - det), 1e-12);
  }
  EXPECT_THROW(scalar_sequence(s, 7), TruncationTooSmall);
}

TEST(VectorPolys, PairsConsecutiveScalars) {
  const auto s = random_complex_state(2, 12);
  const auto P = scalar_polys(s, 4);
  const auto B = vector_polys(s, 4);
  ASSERT_EQ(B.size(), 5u);
  for (std::size_t n = 0; n <= 4; ++n) {
    EXPECT_EQ(B[n].top.coefficients(), P[2 * n].coefficients());
    EXPECT_EQ(B[n].bottom.coefficients(), P[2 * n + 1].coefficients());
  }
  EXPECT_THROW(vector_polys(s, 6), TruncationTooSmall);
}

TEST(ScalarSequence, EigenvectorRelationOfTheTruncation) {
  // v = (P_0(z), .., P_{m-1}(z))^T satisfies J v = z v - P_m(z) e_m
  const auto s = random_complex_state(7, 10);
  const auto P = scalar_sequence(s, 10);
  const DenseMatrix J = BandedOperator(s).dense();
  for (Complex z : sample_points()) {
    ComplexVector v(10);
    for (Eigen::Index i = 0; i < 10; ++i) v(i) = P[static_cast<std::size_t>(i)](z);
    ComplexVector r = J * v - z * v;
    r(9) += P[10](z);
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Blocks, Layout) {
  const LatticeState s({1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11}, {12, 13, 14, 15});
  Block2 A;
  A << 0, 0, 1, 0;
  EXPECT_EQ(block_A(), A);
  Block2 C0;
  C0 << 1, 0, -1, 1;
  EXPECT_EQ(block_C0(s), C0);
  EXPECT_EQ(block_C(s, 0), C0);
  Block2 C1;
  C1 << 12, 8, 0, 13;
  EXPECT_EQ(block_C(s, 1), C1);
  Block2 B1;
  B1 << 1, 1, 7, 2;
  EXPECT_EQ(block_B(s, 1), B1);
  Block2 B2;
  B2 << 3, 1, 9, 4;
  EXPECT_EQ(block_B(s, 2), B2);
  Block2 D0;
  D0 << 0, 0, 7, 0;
  EXPECT_EQ(block_D(s, 0), D0);
  Block2 D1;
  D1 << 0, 0, 9, 0;
  EXPECT_EQ(block_D(s, 1), D1);
  EXPECT_THROW(block_B(s, 0), TruncationTooSmall);
  EXPECT_THROW(block_B(s, 4), TruncationTooSmall);
  // the blocks tile J: block (n+1, n) of J is C_n, block (n, n) is B_n
  const BandedOperator J(s);
  EXPECT_EQ(block_at(J, 2, 1), C1);
  EXPECT_EQ(block_at(J, 2, 2), B2);
}

TEST(Blocks, SequencesAndAssemblyRoundTrip) {
  const auto s = random_complex_state(4, 10);
  const auto seq = block_sequences(s);
  EXPECT_EQ(seq.Cn.size(), 5u);
  EXPECT_EQ(seq.Bn.size(), 5u);
  EXPECT_EQ(seq.Dn.size(), 5u);
  EXPECT_EQ(seq.C(2), block_C(s, 2));
  EXPECT_EQ(seq.B(5), block_B(s, 5));
  EXPECT_EQ(seq.D(3), block_D(s, 3));
  EXPECT_EQ(assemble_lattice(seq.Cn, seq.Bn), s);
}

TEST(Recurrence, BlockFormHoldsAtRandomPoints) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = random_complex_state(seed, 14);
    const auto B = vector_polys(s, 6);
    for (std::size_t n = 0; n + 1 < B.size(); ++n)
      for (Complex z : sample_points())
        EXPECT_LT(recurrence_residual(s, B, n, z).cwiseAbs().maxCoeff(), 1e-13)
            << "seed " << seed << " n " << n;
  }
}

TEST(Recurrence, DetectsAWrongBlock) {
  const auto s = random_complex_state(3, 12);
  auto B = vector_polys(s, 4);
  B[2].top += Polynomial::monomial(0, 0.1);
  EXPECT_GT(recurrence_residual(s, B, 2, Complex(0.2, 0.1)).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(DerivativeLaw, ZeroOrderIsTrivial) {
  const Trajectory traj = testing::bounded_trajectory(1, 12);
  // B_0 = (1, z - a_1): only the difference quotient of a_1 contributes
  const Vector2 r = derivative_law_residual(traj, 0, 0.5, Complex(0.3, 0.2));
  EXPECT_EQ(r(0), Complex(0.0));
  EXPECT_LT(std::abs(r(1)), 1e-6);
}

TEST(DerivativeLaw, HoldsAlongTheFlow) {
  const Trajectory traj = testing::bounded_trajectory(6, 12);
  for (std::size_t n = 1; n <= 3; ++n)
    for (Complex z : sample_points())
      EXPECT_LT(derivative_law_residual(traj, n, 0.5, z).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(DerivativeLaw, FrozenBViolatesIt) {
  const Trajectory good = testing::bounded_trajectory(6, 12);
  IntegratorConfig cfg;
  cfg.corruption = {Distortion::freeze_b, 1.0};
  const Trajectory bad = integrate(good.front(), cfg);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (Complex z : sample_points())
      worst = std::max(worst, derivative_law_residual(bad, n, 0.5, z).cwiseAbs().maxCoeff());
  EXPECT_GT(worst, 1e-2);
}

TEST(Reconstruction, RecoversEveryBlockAtSmallSize) {
  const auto s = random_complex_state(9, 10, 0.5);
  const auto U = moments_from_J(BandedOperator(s), 2 * 10, Truncation::finite);
  const auto B = vector_polys(s, 4);
  const FunctionalOnBasis u = [&](std::size_t j, std::size_t k) {
    return apply_U(U, B.at(k).shifted(j));
  };
  const auto r = reconstruct_blocks(u, block_C0(s), 4);
  ASSERT_EQ(r.Cn.size(), 5u);
  ASSERT_EQ(r.Bn.size(), 5u);
  const auto seq = block_sequences(s);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_LT(testing::block_gap(r.Cn[n], seq.C(n)), 1e-10);
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_LT(testing::block_gap(r.Bn[n - 1], seq.B(n)), 1e-10);
  const LatticeState back = assemble_lattice(r.Cn, r.Bn);
  for (long n = 1; n <= 10; ++n) EXPECT_LT(std::abs(back.a(n) - s.a(n)), 1e-10);
}

TEST(Reconstruction, UnitLatticeWithZeroDiagonal) {
  const auto s = constant_state(10, 0.0, 0.0, 1.0);
  const auto U = moments_from_J(BandedOperator(s), 12, Truncation::finite);
  const auto B = vector_polys(s, 4);
  const FunctionalOnBasis u = [&](std::size_t j, std::size_t k) {
    return apply_U(U, B.at(k).shifted(j));
  };
  const auto r = reconstruct_blocks(u, block_C0(s), 2);
  EXPECT_LT(testing::block_gap(r.Cn[1], Block2::Identity()), 1e-14);
  EXPECT_LT(testing::block_gap(r.Bn[0], block_B(s, 1)), 1e-14);
}

TEST(Reconstruction, SingularPivotThrows) {
  const FunctionalOnBasis u = [](std::size_t, std::size_t) { return Block2::Zero().eval(); };
  EXPECT_THROW(reconstruct_blocks(u, Block2::Identity(), 2), SingularBlock);
}

}  // namespace
}  // namespace ktoda
