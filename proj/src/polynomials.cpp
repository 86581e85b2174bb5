#include "ktoda/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace ktoda {

Polynomial::Polynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {}

Polynomial Polynomial::monomial(std::size_t degree, Complex coefficient) {
  std::vector<Complex> c(degree + 1);
  c[degree] = coefficient;
  return Polynomial(std::move(c));
}

std::size_t Polynomial::degree() const noexcept {
  return coeffs_.empty() ? 0 : coeffs_.size() - 1;
}

Complex Polynomial::coefficient(std::size_t k) const noexcept {
  return k < coeffs_.size() ? coeffs_[k] : Complex{};
}

Complex Polynomial::operator()(Complex z) const noexcept {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::shifted(std::size_t k) const {
  if (coeffs_.empty()) return {};
  std::vector<Complex> c(coeffs_.size() + k);
  std::copy(coeffs_.begin(), coeffs_.end(), c.begin() + static_cast<std::ptrdiff_t>(k));
  return Polynomial(std::move(c));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  for (auto& x : coeffs_) x *= s;
  return *this;
}

VectorPolynomial operator*(const Block2& E, const VectorPolynomial& Q) {
  return {E(0, 0) * Q.top + E(0, 1) * Q.bottom, E(1, 0) * Q.top + E(1, 1) * Q.bottom};
}

VectorPolynomial operator+(const VectorPolynomial& P, const VectorPolynomial& Q) {
  return {P.top + Q.top, P.bottom + Q.bottom};
}

std::vector<Polynomial> scalar_sequence(const LatticeState& s, std::size_t max_degree) {
  if (max_degree > s.dimension()) {
    std::ostringstream os;
    os << "scalar_sequence: P_" << max_degree << " needs a truncation of size >= "
       << max_degree << ", have m = " << s.dimension();
    throw TruncationTooSmall(os.str());
  }
  std::vector<Polynomial> P;
  P.reserve(max_degree + 1);
  P.push_back(Polynomial({1.0}));
  for (std::size_t n = 0; n < max_degree; ++n) {
    const long idx = static_cast<long>(n);
    // P_{n+1} = z P_n - a_{n+1} P_n - b_n P_{n-1} - c_{n-1} P_{n-2}
    Polynomial next = P[n].shifted(1);
    next -= s.a(idx + 1) * P[n];
    if (n >= 1) next -= s.b(idx) * P[n - 1];
    if (n >= 2) next -= s.c(idx - 1) * P[n - 2];
    P.push_back(std::move(next));
  }
  return P;
}

namespace {

void require_vector_range(const LatticeState& s, std::size_t n_max) {
  if (2 * n_max + 1 >= s.dimension()) {
    std::ostringstream os;
    os << "n_max: B_" << n_max << " needs 2 n_max + 1 < m, have m = " << s.dimension();
    throw TruncationTooSmall(os.str());
  }
}

}  // namespace

std::vector<Polynomial> scalar_polys(const LatticeState& s, std::size_t n_max) {
  require_vector_range(s, n_max);
  return scalar_sequence(s, 2 * n_max + 1);
}

std::vector<VectorPolynomial> vector_polys(const LatticeState& s, std::size_t n_max) {
  const auto P = scalar_polys(s, n_max);
  std::vector<VectorPolynomial> B;
  B.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) B.push_back({P[2 * n], P[2 * n + 1]});
  return B;
}

Block2 block_A() {
  Block2 A = Block2::Zero();
  A(1, 0) = 1.0;
  return A;
}

Block2 block_C0(const LatticeState& s) {
  Block2 C = Block2::Identity();
  C(1, 0) = -s.a(1);
  return C;
}

Block2 block_C(const LatticeState& s, std::size_t n) {
  if (n == 0) return block_C0(s);
  if (2 * n > s.dimension() - 2) throw TruncationTooSmall("block_C: index beyond truncation");
  const long k = static_cast<long>(n);
  Block2 C;
  C << s.c(2 * k - 1), s.b(2 * k), 0.0, s.c(2 * k);
  return C;
}

Block2 block_B(const LatticeState& s, std::size_t n) {
  if (n == 0 || 2 * n > s.dimension()) throw TruncationTooSmall("block_B: index out of range");
  const long k = static_cast<long>(n);
  Block2 B;
  B << s.a(2 * k - 1), 1.0, s.b(2 * k - 1), s.a(2 * k);
  return B;
}

Block2 block_D(const LatticeState& s, std::size_t n) {
  if (2 * n + 1 > s.dimension() - 1) throw TruncationTooSmall("block_D: index beyond truncation");
  Block2 D = Block2::Zero();
  D(1, 0) = s.b(2 * static_cast<long>(n) + 1);
  return D;
}

BlockSequences block_sequences(const LatticeState& s) {
  const std::size_t half = s.dimension() / 2;
  BlockSequences seq{block_A(), {}, {}, {}};
  for (std::size_t n = 0; n < half; ++n) seq.Cn.push_back(block_C(s, n));
  for (std::size_t n = 1; n <= half; ++n) seq.Bn.push_back(block_B(s, n));
  for (std::size_t n = 0; n < half; ++n) seq.Dn.push_back(block_D(s, n));
  return seq;
}

LatticeState assemble_lattice(const std::vector<Block2>& Cn, const std::vector<Block2>& Bn,
                              double t) {
  const std::size_t half = Bn.size();
  if (half < 2 || Cn.size() < half)
    throw InvalidArgument("assemble_lattice: need C_0..C_{m/2-1} and B_1..B_{m/2}");
  const std::size_t m = 2 * half;
  std::vector<Complex> a(m), b(m - 1), c(m - 2);
  for (std::size_t n = 1; n <= half; ++n) {
    const Block2& B = Bn[n - 1];
    a[2 * n - 2] = B(0, 0);
    a[2 * n - 1] = B(1, 1);
    b[2 * n - 2] = B(1, 0);
  }
  for (std::size_t n = 1; n < half; ++n) {
    const Block2& C = Cn[n];
    c[2 * n - 2] = C(0, 0);
    c[2 * n - 1] = C(1, 1);
    b[2 * n - 1] = C(0, 1);
  }
  return LatticeState(std::move(a), std::move(b), std::move(c), t);
}

Vector2 recurrence_residual(const LatticeState& s, const std::vector<VectorPolynomial>& polys,
                            std::size_t n, Complex z0) {
  if (n + 1 >= polys.size()) throw InvalidArgument("recurrence_residual: need B_{n+1}");
  const Vector2 prev = n == 0 ? Vector2::Zero().eval() : polys[n - 1](z0);
  const Vector2 here = polys[n](z0);
  const Vector2 next = polys[n + 1](z0);
  const Block2 Bnext = block_B(s, n + 1);
  return block_C(s, n) * prev + (Bnext - z0 * Block2::Identity()) * here + block_A() * next;
}

Vector2 derivative_law_residual(const Trajectory& traj, std::size_t n, double t, Complex z0) {
  const std::size_t i = traj.interior_index(t);
  const auto before = vector_polys(traj[i - 1].state, n);
  const auto after = vector_polys(traj[i + 1].state, n);
  const double inv = 1.0 / (2.0 * traj.step());
  const Polynomial top_rate = inv * (after[n].top - before[n].top);
  const Polynomial bottom_rate = inv * (after[n].bottom - before[n].bottom);
  const Vector2 rate(top_rate(z0), bottom_rate(z0));

  const LatticeState& s = traj[i].state;
  const auto here = vector_polys(s, n);
  Vector2 rhs = -block_D(s, n) * here[n](z0);
  if (n >= 1) rhs -= block_C(s, n) * here[n - 1](z0);
  return rate - rhs;
}

ReconstructedBlocks reconstruct_blocks(const FunctionalOnBasis& u, const Block2& C0,
                                       std::size_t count) {
  ReconstructedBlocks out;
  out.Cn.push_back(C0);
  // pivots[k] = U(z^k B_k)^{-1}
  std::vector<Block2> pivots;
  pivots.push_back(checked_inverse(u(0, 0)));
  for (std::size_t n = 1; n <= count; ++n) {
    const Block2 diag = u(n, n);
    out.Cn.push_back(diag * pivots[n - 1]);
    pivots.push_back(checked_inverse(diag));
  }
  for (std::size_t n = 1; n <= count + 1; ++n) {
    Block2 numer = u(n, n - 1);
    if (n >= 2) numer -= out.Cn[n - 1] * u(n - 1, n - 2);
    out.Bn.push_back(numer * pivots[n - 1]);
  }
  return out;
}

}  // namespace ktoda
