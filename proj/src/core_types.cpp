#include "ktoda/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace ktoda {

CNearZero::CNearZero(double time, std::size_t index, double magnitude)
    : Error([&] {
        std::ostringstream os;
        os << "c_" << index << " fell to |c| = " << magnitude << " at t = " << time;
        return os.str();
      }()),
      time_(time),
      index_(index),
      magnitude_(magnitude) {}

LatticeState::LatticeState(std::vector<Complex> a, std::vector<Complex> b,
                           std::vector<Complex> c, double t)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), t_(t) {
  const std::size_t m = a_.size();
  if (m < 4 || m % 2 != 0) {
    std::ostringstream os;
    os << "m: dimension must be even and >= 4, got " << m;
    throw InvalidArgument(os.str());
  }
  if (b_.size() != m - 1) {
    std::ostringstream os;
    os << "b: expected " << m - 1 << " entries, got " << b_.size();
    throw InvalidArgument(os.str());
  }
  if (c_.size() != m - 2) {
    std::ostringstream os;
    os << "c: expected " << m - 2 << " entries, got " << c_.size();
    throw InvalidArgument(os.str());
  }
}

namespace {

Complex padded(const std::vector<Complex>& v, long n) noexcept {
  if (n < 1 || static_cast<std::size_t>(n) > v.size()) return Complex{0.0, 0.0};
  return v[static_cast<std::size_t>(n - 1)];
}

}  // namespace

Complex LatticeState::a(long n) const noexcept { return padded(a_, n); }
Complex LatticeState::b(long n) const noexcept { return padded(b_, n); }
Complex LatticeState::c(long n) const noexcept { return padded(c_, n); }

double LatticeState::min_abs_c() const noexcept {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& x : c_) lo = std::min(lo, std::abs(x));
  return lo;
}

bool LatticeState::satisfies_c_floor(double floor) const noexcept {
  return std::all_of(c_.begin(), c_.end(),
                     [floor](const Complex& x) { return std::abs(x) >= floor; });
}

double LatticeState::max_abs_entry() const noexcept {
  double hi = 0.0;
  for (const auto* v : {&a_, &b_, &c_})
    for (const auto& x : *v) hi = std::max(hi, std::abs(x));
  return hi;
}

LatticeState LatticeState::with_time(double t) const {
  LatticeState s = *this;
  s.t_ = t;
  return s;
}

BandedOperator::BandedOperator(LatticeState state) : state_(std::move(state)) {}

Complex BandedOperator::entry(std::size_t row, std::size_t col) const noexcept {
  const std::size_t m = dimension();
  if (row >= m || col >= m) return {};
  if (col == row + 1) return {1.0, 0.0};
  if (col == row) return state_.diagonal()[row];
  if (row == col + 1) return state_.subdiagonal()[col];
  if (row == col + 2) return state_.second_subdiagonal()[col];
  return {};
}

DenseMatrix BandedOperator::dense() const {
  const auto m = static_cast<Eigen::Index>(dimension());
  DenseMatrix J = DenseMatrix::Zero(m, m);
  const auto a = state_.diagonal();
  const auto b = state_.subdiagonal();
  const auto c = state_.second_subdiagonal();
  for (Eigen::Index i = 0; i < m; ++i) {
    J(i, i) = a[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      J(i, i + 1) = 1.0;
      J(i + 1, i) = b[static_cast<std::size_t>(i)];
    }
    if (i + 2 < m) J(i + 2, i) = c[static_cast<std::size_t>(i)];
  }
  return J;
}

DenseMatrix BandedOperator::strictly_lower() const {
  const auto m = static_cast<Eigen::Index>(dimension());
  DenseMatrix L = DenseMatrix::Zero(m, m);
  const auto b = state_.subdiagonal();
  const auto c = state_.second_subdiagonal();
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    L(i + 1, i) = b[static_cast<std::size_t>(i)];
    if (i + 2 < m) L(i + 2, i) = c[static_cast<std::size_t>(i)];
  }
  return L;
}

Columns2 BandedOperator::apply(const Columns2& v) const {
  const auto m = static_cast<Eigen::Index>(dimension());
  if (v.rows() != m) throw InvalidArgument("apply: row count does not match dimension");
  const auto a = state_.diagonal();
  const auto b = state_.subdiagonal();
  const auto c = state_.second_subdiagonal();
  Columns2 out(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.row(i) = a[k] * v.row(i);
    if (i + 1 < m) out.row(i) += v.row(i + 1);
    if (i >= 1) out.row(i) += b[k - 1] * v.row(i - 1);
    if (i >= 2) out.row(i) += c[k - 2] * v.row(i - 2);
  }
  return out;
}

NormBound norm_bound(const BandedOperator& J) {
  const std::size_t m = J.dimension();
  const auto& s = J.state();
  double rho = 0.0;
  for (std::size_t row = 1; row <= m; ++row) {
    const long n = static_cast<long>(row);
    double sum = std::abs(s.c(n - 2)) + std::abs(s.b(n - 1)) + std::abs(s.a(n));
    if (row < m) sum += 1.0;
    rho = std::max(rho, sum);
  }
  return NormBound{rho};
}

namespace {

void check_block_index(std::size_t dim, std::size_t i, std::size_t j) {
  if (dim % 2 != 0) throw InvalidArgument("block_at: dimension must be even");
  const std::size_t blocks = dim / 2;
  if (i < 1 || j < 1 || i > blocks || j > blocks) {
    std::ostringstream os;
    os << "block_at: block (" << i << ", " << j << ") outside 1.." << blocks;
    throw InvalidArgument(os.str());
  }
}

}  // namespace

Block2 block_at(const DenseMatrix& M, std::size_t i, std::size_t j) {
  if (M.rows() != M.cols()) throw InvalidArgument("block_at: matrix must be square");
  check_block_index(static_cast<std::size_t>(M.rows()), i, j);
  return M.block<2, 2>(static_cast<Eigen::Index>(2 * (i - 1)),
                       static_cast<Eigen::Index>(2 * (j - 1)));
}

Block2 block_at(const BandedOperator& J, std::size_t i, std::size_t j) {
  check_block_index(J.dimension(), i, j);
  Block2 B;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t q = 0; q < 2; ++q)
      B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) =
          J.entry(2 * (i - 1) + r, 2 * (j - 1) + q);
  return B;
}

DenseMatrix commutator(const DenseMatrix& M, const DenseMatrix& N) {
  if (M.rows() != M.cols() || N.rows() != N.cols() || M.rows() != N.rows()) {
    std::ostringstream os;
    os << "commutator: dimension mismatch (" << M.rows() << "x" << M.cols() << " vs "
       << N.rows() << "x" << N.cols() << ")";
    throw InvalidArgument(os.str());
  }
  return M * N - N * M;
}

std::vector<Block2> block_powers(const BandedOperator& J, std::size_t max_power) {
  const auto m = static_cast<Eigen::Index>(J.dimension());
  Columns2 v = Columns2::Zero(m, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  std::vector<Block2> out;
  out.reserve(max_power + 1);
  out.emplace_back(v.topRows<2>());
  for (std::size_t k = 1; k <= max_power; ++k) {
    v = J.apply(v);
    out.emplace_back(v.topRows<2>());
  }
  return out;
}

double inf_norm(const Block2& B) {
  return std::max(std::abs(B(0, 0)) + std::abs(B(0, 1)),
                  std::abs(B(1, 0)) + std::abs(B(1, 1)));
}

double max_abs(const Block2& B) { return B.cwiseAbs().maxCoeff(); }

double max_abs(const DenseMatrix& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

Block2 checked_inverse(const Block2& B, double threshold) {
  const Complex det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
  if (!(std::abs(det) > threshold)) {
    std::ostringstream os;
    os << "singular 2x2 block (|det| = " << std::abs(det) << ")";
    throw SingularBlock(os.str());
  }
  Block2 inv;
  inv << B(1, 1), -B(0, 1), -B(1, 0), B(0, 0);
  return inv / det;
}

}  // namespace ktoda
