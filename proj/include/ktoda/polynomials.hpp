#pragma once

// Scalar sequence P_n, vector sequence B_n = (P_{2n}, P_{2n+1})^T, the
// recurrence blocks A, B_n, C_n, D_n, and the derivative law of B_n along
// the flow.

#include <cstddef>
#include <functional>
#include <vector>

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"

namespace ktoda {

/// Dense coefficients in the monomial basis, ascending degree.  The stored
/// length is the nominal degree + 1; leading zeros are kept.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coefficients);

  static Polynomial monomial(std::size_t degree, Complex coefficient = 1.0);

  /// Nominal degree (length - 1); 0 for the empty polynomial.
  std::size_t degree() const noexcept;
  bool empty() const noexcept { return coeffs_.empty(); }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
  /// Zero beyond the stored length.
  Complex coefficient(std::size_t k) const noexcept;

  /// Horner evaluation.
  Complex operator()(Complex z) const noexcept;

  /// z^k p(z).
  Polynomial shifted(std::size_t k) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Complex s, Polynomial p) { return p *= s; }

 private:
  std::vector<Complex> coeffs_;
};

/// A pair (q_1, q_2)^T of polynomials; B_n when built by vector_polys.
struct VectorPolynomial {
  Polynomial top;
  Polynomial bottom;

  Vector2 operator()(Complex z) const { return Vector2(top(z), bottom(z)); }
  std::size_t degree() const noexcept { return std::max(top.degree(), bottom.degree()); }
  VectorPolynomial shifted(std::size_t k) const { return {top.shifted(k), bottom.shifted(k)}; }
};

/// E * Q: the rows of Q recombined with the entries of E.
VectorPolynomial operator*(const Block2& E, const VectorPolynomial& Q);
VectorPolynomial operator+(const VectorPolynomial& P, const VectorPolynomial& Q);

/// P_0 .. P_max_degree from
///   P_{n+1} = (z - a_{n+1}) P_n - b_n P_{n-1} - c_{n-1} P_{n-2},
/// P_0 = 1, P_{-1} = P_{-2} = 0.  Requires max_degree <= m.
std::vector<Polynomial> scalar_sequence(const LatticeState& s, std::size_t max_degree);

/// P_0 .. P_{2 n_max + 1}; requires 2 n_max + 1 < m.
std::vector<Polynomial> scalar_polys(const LatticeState& s, std::size_t n_max);

/// B_0 .. B_{n_max}; requires 2 n_max + 1 < m.
std::vector<VectorPolynomial> vector_polys(const LatticeState& s, std::size_t n_max);

Block2 block_A();
/// C_0 = [[1, 0], [-a_1, 1]].
Block2 block_C0(const LatticeState& s);
/// C_n = [[c_{2n-1}, b_{2n}], [0, c_{2n}]] for n >= 1, C_0 for n = 0.
Block2 block_C(const LatticeState& s, std::size_t n);
/// B_n = [[a_{2n-1}, 1], [b_{2n-1}, a_{2n}]] for n >= 1.
Block2 block_B(const LatticeState& s, std::size_t n);
/// D_n = [[0, 0], [b_{2n+1}, 0]].
Block2 block_D(const LatticeState& s, std::size_t n);

/// All blocks available in the truncation: C_0..C_{m/2-1}, B_1..B_{m/2},
/// D_0..D_{m/2-1}.
struct BlockSequences {
  Block2 A;
  std::vector<Block2> Cn;  ///< Cn[n] = C_n
  std::vector<Block2> Bn;  ///< Bn[n - 1] = B_n
  std::vector<Block2> Dn;  ///< Dn[n] = D_n

  const Block2& C(std::size_t n) const { return Cn.at(n); }
  const Block2& B(std::size_t n) const { return Bn.at(n - 1); }
  const Block2& D(std::size_t n) const { return Dn.at(n); }
};

BlockSequences block_sequences(const LatticeState& s);

/// Rebuild a, b, c (dimension m = 2 * Bn.size()) from C_1.. and B_1..;
/// needs Cn.size() >= m/2 (C_0 first) and Bn.size() == m/2.
LatticeState assemble_lattice(const std::vector<Block2>& Cn, const std::vector<Block2>& Bn,
                              double t = 0.0);

/// C_n B_{n-1}(z0) + (B_{n+1} - z0 I) B_n(z0) + A B_{n+1}(z0).
Vector2 recurrence_residual(const LatticeState& s, const std::vector<VectorPolynomial>& polys,
                            std::size_t n, Complex z0);

/// d/dt B_n(z0) (central differences of the coefficients, then evaluated)
/// minus -C_n B_{n-1}(z0) - D_n B_n(z0).
Vector2 derivative_law_residual(const Trajectory& traj, std::size_t n, double t, Complex z0);

/// u(j, k) = U(z^j B_k).
using FunctionalOnBasis = std::function<Block2(std::size_t j, std::size_t k)>;

struct ReconstructedBlocks {
  std::vector<Block2> Cn;  ///< Cn[n] = C_n, n = 0..count (C_0 as given)
  std::vector<Block2> Bn;  ///< Bn[n - 1] = B_n, n = 1..count + 1
};

/// C_n = U(z^n B_n) U(z^{n-1} B_{n-1})^{-1}
/// B_n = (U(z^n B_{n-1}) - C_{n-1} U(z^{n-1} B_{n-2})) U(z^{n-1} B_{n-1})^{-1}
/// for n = 1..count (C) and n = 1..count+1 (B).  Throws SingularBlock.
ReconstructedBlocks reconstruct_blocks(const FunctionalOnBasis& u, const Block2& C0,
                                       std::size_t count);

}  // namespace ktoda
