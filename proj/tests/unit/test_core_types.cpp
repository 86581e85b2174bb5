#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

namespace ktoda {
namespace {

using testing::constant_state;
using testing::random_complex_state;

TEST(LatticeState, RejectsBadShapesNamingTheField) {
  try {
    LatticeState({1, 2, 3}, {1, 2}, {1});
    FAIL() << "odd m accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("m:"), std::string::npos);
  }
  try {
    LatticeState({0, 0, 0, 0}, {0, 0}, {0, 0});
    FAIL() << "short b accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("b:"), std::string::npos);
  }
  try {
    LatticeState({0, 0, 0, 0}, {0, 0, 0}, {0});
    FAIL() << "short c accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("c:"), std::string::npos);
  }
  EXPECT_THROW(LatticeState({0, 0}, {0}, {}), InvalidArgument);
}

TEST(LatticeState, OneBasedAccessWithZeroPadding) {
  const LatticeState s({1, 2, 3, 4}, {5, 6, 7}, {8, 9}, 0.25);
  EXPECT_EQ(s.dimension(), 4u);
  EXPECT_EQ(s.time(), 0.25);
  EXPECT_EQ(s.a(1), Complex(1));
  EXPECT_EQ(s.a(4), Complex(4));
  EXPECT_EQ(s.b(3), Complex(7));
  EXPECT_EQ(s.c(2), Complex(9));
  EXPECT_EQ(s.b(0), Complex(0));
  EXPECT_EQ(s.b(4), Complex(0));
  EXPECT_EQ(s.c(3), Complex(0));
  EXPECT_EQ(s.c(0), Complex(0));
  EXPECT_EQ(s.a(5), Complex(0));
  EXPECT_DOUBLE_EQ(s.min_abs_c(), 8.0);
  EXPECT_DOUBLE_EQ(s.max_abs_entry(), 9.0);
  EXPECT_TRUE(s.satisfies_c_floor(8.0));
  EXPECT_FALSE(s.satisfies_c_floor(8.5));
  EXPECT_EQ(s.with_time(1.0).time(), 1.0);
  EXPECT_EQ(s.with_time(1.0).a(2), s.a(2));
}

TEST(BandedOperator, DenseLayoutAndBandStructure) {
  const auto s = random_complex_state(3, 8);
  const BandedOperator J(s);
  const DenseMatrix D = J.dense();
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) {
      const auto r = static_cast<std::size_t>(i), c = static_cast<std::size_t>(j);
      EXPECT_EQ(D(i, j), J.entry(r, c));
      if (j == i + 1) EXPECT_EQ(D(i, j), Complex(1.0));
      if (j > i + 1 || i > j + 2) EXPECT_EQ(D(i, j), Complex(0.0));
    }
  EXPECT_EQ(D(0, 0), s.a(1));
  EXPECT_EQ(D(1, 0), s.b(1));
  EXPECT_EQ(D(2, 0), s.c(1));
  const DenseMatrix L = J.strictly_lower();
  EXPECT_EQ((D - L).triangularView<Eigen::StrictlyLower>().toDenseMatrix(), DenseMatrix::Zero(8, 8));
  EXPECT_EQ(L.triangularView<Eigen::Upper>().toDenseMatrix(), DenseMatrix::Zero(8, 8));
}

TEST(BandedOperator, ApplyMatchesDenseProduct) {
  const BandedOperator J(random_complex_state(5, 10));
  Columns2 v = Columns2::Random(10, 2);
  const Columns2 banded = J.apply(v);
  const Columns2 dense = J.dense() * v;
  EXPECT_LT((banded - dense).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(J.apply(Columns2::Zero(9, 2)), InvalidArgument);
}

TEST(BlockAt, ReadsTheLayout) {
  const LatticeState s({1, 2, 3, 4, 5, 6}, {7, 8, 9, 10, 11}, {12, 13, 14, 15});
  const BandedOperator J(s);
  Block2 b11;
  b11 << 1.0, 1.0, 7.0, 2.0;
  EXPECT_EQ(block_at(J, 1, 1), b11);
  Block2 b21;
  b21 << 12.0, 8.0, 0.0, 13.0;
  EXPECT_EQ(block_at(J, 2, 1), b21);
  const DenseMatrix I = DenseMatrix::Identity(6, 6);
  for (std::size_t i = 1; i <= 3; ++i) EXPECT_EQ(block_at(I, i, i), Block2::Identity());
  EXPECT_THROW(block_at(J, 0, 1), InvalidArgument);
  EXPECT_THROW(block_at(J, 4, 1), InvalidArgument);
}

TEST(BlockAt, ReassemblesTheMatrix) {
  const BandedOperator J(random_complex_state(11, 8));
  const DenseMatrix D = J.dense();
  DenseMatrix R(8, 8);
  for (std::size_t i = 1; i <= 4; ++i)
    for (std::size_t j = 1; j <= 4; ++j)
      R.block<2, 2>(static_cast<Eigen::Index>(2 * i - 2), static_cast<Eigen::Index>(2 * j - 2)) =
          block_at(D, i, j);
  EXPECT_EQ(R, D);
}

TEST(Commutator, BasicIdentities) {
  const DenseMatrix J = BandedOperator(random_complex_state(2, 6)).dense();
  const DenseMatrix I = DenseMatrix::Identity(6, 6);
  EXPECT_EQ(commutator(J, I), DenseMatrix::Zero(6, 6));
  EXPECT_EQ(commutator(J, J), DenseMatrix::Zero(6, 6));
  const DenseMatrix N = DenseMatrix::Random(6, 6);
  EXPECT_EQ(commutator(J, N), (-commutator(N, J)).eval());
  EXPECT_THROW(commutator(J, DenseMatrix::Zero(4, 4)), InvalidArgument);
}

TEST(Commutator, UnitLatticeAgainstHandMultiplication) {
  const BandedOperator J(constant_state(6, 0.0, 1.0, 1.0));
  const DenseMatrix D = J.dense(), L = J.strictly_lower();
  DenseMatrix expected = DenseMatrix::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) expected(i, j) += D(i, k) * L(k, j) - L(i, k) * D(k, j);
  EXPECT_EQ(commutator(D, L), expected);
  // same matrix as the coefficient form: a' = (1,0,0,0,0,-1), b' = (1,0,0,0,-1), c' = 0
  EXPECT_EQ(expected(0, 0), Complex(1.0));
  EXPECT_EQ(expected(5, 5), Complex(-1.0));
  EXPECT_EQ(expected(1, 0), Complex(1.0));
  EXPECT_EQ(expected(5, 4), Complex(-1.0));
  EXPECT_EQ(expected(2, 0), Complex(0.0));
}

TEST(NormBound, Examples) {
  EXPECT_DOUBLE_EQ(norm_bound(BandedOperator(constant_state(6, 0.0, 0.0, 0.0))).rho, 1.0);
  EXPECT_DOUBLE_EQ(norm_bound(BandedOperator(constant_state(6, 1.0, 1.0, 1.0))).rho, 4.0);
  EXPECT_DOUBLE_EQ(
      norm_bound(BandedOperator(constant_state(6, Complex(0.0, 1.0), 2.0, 0.0))).rho, 4.0);
}

TEST(NormBound, EqualsDenseInfinityNormAndBoundsSpectrum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const BandedOperator J(random_complex_state(seed, 8 + 2 * (seed % 3)));
    const DenseMatrix D = J.dense();
    const double inf = D.cwiseAbs().rowwise().sum().maxCoeff();
    EXPECT_NEAR(norm_bound(J).rho, inf, 1e-14);
    const Eigen::ComplexEigenSolver<DenseMatrix> es(D, false);
    EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), norm_bound(J).rho);
  }
}

TEST(BlockPowers, MatchDensePowers) {
  const BandedOperator J(random_complex_state(17, 10));
  const auto powers = block_powers(J, 12);
  ASSERT_EQ(powers.size(), 13u);
  for (std::size_t k = 0; k <= 12; ++k) {
    const Block2 oracle = testing::dense_power(J.dense(), k).topLeftCorner<2, 2>();
    EXPECT_LT(testing::block_gap(powers[k], oracle), 1e-13) << "k = " << k;
  }
  EXPECT_EQ(powers[0], Block2::Identity());
  EXPECT_EQ(powers[1], block_at(J, 1, 1));
}

TEST(BlockPowers, LocalityUnderLargerTruncations) {
  // (J^n)_11 depends only on the leading n+2 rows and columns.
  const auto big = random_complex_state(23, 16);
  std::vector<Complex> a(big.diagonal().begin(), big.diagonal().begin() + 8);
  std::vector<Complex> b(big.subdiagonal().begin(), big.subdiagonal().begin() + 7);
  std::vector<Complex> c(big.second_subdiagonal().begin(), big.second_subdiagonal().begin() + 6);
  const BandedOperator small(LatticeState(a, b, c));
  const auto ps = block_powers(small, 6);
  const auto pb = block_powers(BandedOperator(big), 6);
  for (std::size_t n = 0; n <= 6; ++n) EXPECT_LT(testing::block_gap(ps[n], pb[n]), 1e-14);
}

TEST(Block2Helpers, InverseAndNorms) {
  Block2 B;
  B << 2.0, 1.0, 0.0, 4.0;
  EXPECT_DOUBLE_EQ(inf_norm(B), 4.0);
  EXPECT_DOUBLE_EQ(max_abs(B), 4.0);
  EXPECT_LT(testing::block_gap(checked_inverse(B) * B, Block2::Identity()), 1e-15);
  Block2 S;
  S << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(checked_inverse(S), SingularBlock);
  EXPECT_THROW(checked_inverse(B, 10.0), SingularBlock);
}

}  // namespace
}  // namespace ktoda
