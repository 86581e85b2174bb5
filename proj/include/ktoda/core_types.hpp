#pragma once

// Scalars, 2x2 blocks, the four-banded operator J and the lattice state.
//
// Index conventions: the lattice coefficients a_n, b_n, c_n are addressed
// 1-based through LatticeState::a(n) etc. (matching the usual notation of the
// recurrence), and return 0 outside the stored range.  That zero padding is
// the boundary convention of the finite system: b_0 = c_0 = 0 and
// b_m = c_{m-1} = c_m = 0.  Dense matrices and spans are 0-based.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ktoda/errors.hpp"

namespace ktoda {

using Complex = std::complex<double>;
using Block2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;
using DenseMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Columns2 = Eigen::Matrix<Complex, Eigen::Dynamic, 2>;

/// Largest truncation for which dense matrices are materialised.
inline constexpr std::size_t kDefaultDenseCap = 64;

class LatticeState {
 public:
  /// Throws InvalidArgument unless m = a.size() is even, m >= 4,
  /// b.size() == m-1 and c.size() == m-2.
  LatticeState(std::vector<Complex> a, std::vector<Complex> b,
               std::vector<Complex> c, double t = 0.0);

  std::size_t dimension() const noexcept { return a_.size(); }
  double time() const noexcept { return t_; }

  std::span<const Complex> diagonal() const noexcept { return a_; }
  std::span<const Complex> subdiagonal() const noexcept { return b_; }
  std::span<const Complex> second_subdiagonal() const noexcept { return c_; }

  // 1-based, zero outside the truncation.
  Complex a(long n) const noexcept;
  Complex b(long n) const noexcept;
  Complex c(long n) const noexcept;

  double min_abs_c() const noexcept;
  /// Every |c_n| >= floor.  A floor of 0 accepts anything.
  bool satisfies_c_floor(double floor) const noexcept;
  /// Largest |entry| over a, b and c.
  double max_abs_entry() const noexcept;

  LatticeState with_time(double t) const;

  friend bool operator==(const LatticeState&, const LatticeState&) = default;

 private:
  std::vector<Complex> a_;
  std::vector<Complex> b_;
  std::vector<Complex> c_;
  double t_ = 0.0;
};

/// The m x m truncation of J: ones on the superdiagonal, a on the diagonal,
/// b and c on the first and second subdiagonals.
class BandedOperator {
 public:
  explicit BandedOperator(LatticeState state);

  std::size_t dimension() const noexcept { return state_.dimension(); }
  const LatticeState& state() const noexcept { return state_; }

  /// Entry (row, col), 0-based.
  Complex entry(std::size_t row, std::size_t col) const noexcept;

  DenseMatrix dense() const;
  /// J_-: the bands b and c only.
  DenseMatrix strictly_lower() const;

  /// J * v in O(m) using the band structure.
  Columns2 apply(const Columns2& v) const;

 private:
  LatticeState state_;
};

struct NormBound {
  double rho = 0.0;
};

/// Max absolute row sum of the truncated J (induced infinity norm); an upper
/// bound for the spectral radius.
NormBound norm_bound(const BandedOperator& J);

/// 2x2 block at 1-based block position (i, j): rows 2i-1, 2i and columns
/// 2j-1, 2j.
Block2 block_at(const DenseMatrix& M, std::size_t i, std::size_t j);
Block2 block_at(const BandedOperator& J, std::size_t i, std::size_t j);

/// MN - NM.
DenseMatrix commutator(const DenseMatrix& M, const DenseMatrix& N);

/// (J^k)_11 for k = 0..max_power via banded column iteration.
std::vector<Block2> block_powers(const BandedOperator& J, std::size_t max_power);

/// Induced infinity norm of a 2x2 block.
double inf_norm(const Block2& B);
/// Largest entry modulus.
double max_abs(const Block2& B);
double max_abs(const DenseMatrix& M);

/// Inverse of a 2x2 block; throws SingularBlock if |det| <= threshold.
Block2 checked_inverse(const Block2& B, double threshold = 0.0);

}  // namespace ktoda
