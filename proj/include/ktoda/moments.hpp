#pragma once

// The vector of functionals U, held extensionally through its matrix
// moments U(z^k P_0), k = 0..max_order.

#include <cstddef>
#include <vector>

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"
#include "ktoda/polynomials.hpp"

namespace ktoda {

/// Whether moments_from_J insists on orders that coincide with those of the
/// untruncated operator (k <= m - 2), or accepts any order of the finite
/// system.
enum class Truncation { local, finite };

class MomentFunctional {
 public:
  /// moments[k] = U(z^k P_0); needs at least moment 0.
  explicit MomentFunctional(std::vector<Block2> moments);

  std::size_t max_order() const noexcept { return moments_.size() - 1; }
  /// Throws OrderOverflow beyond max_order().
  const Block2& moment(std::size_t k) const;
  const std::vector<Block2>& moments() const noexcept { return moments_; }

 private:
  std::vector<Block2> moments_;
};

/// moment k = C_0^{-1} (J^k)_11 C_0, k = 0..n_max.
MomentFunctional moments_from_J(const BandedOperator& J, std::size_t n_max,
                                Truncation policy = Truncation::local);

/// U(Q) = sum_m E_m U(z^{2m} P_0) where (E_m)_{i1}, (E_m)_{i2} are the
/// coefficients of z^{2m}, z^{2m+1} in row i of Q.
Block2 apply_U(const MomentFunctional& U, const VectorPolynomial& Q);

/// Moments from the orthogonality conditions alone: expand z^j P_0 in the
/// basis B_0, B_1, ... and keep E_0 U(B_0) = E_0 C_0.  Independent of any
/// power of J.  Requires n_max + 1 < m.
MomentFunctional moments_from_orthogonality(const LatticeState& s, std::size_t n_max);

/// d/dt U(z^n P_0) by central differences minus
/// U(z^{n+1} P_0) - U(z^n P_0) U(z P_0).
Block2 moment_ode_residual(const Trajectory& traj, std::size_t n, double t);

/// d/dt U(Q) by central differences for a fixed Q, minus
/// U(zQ) - U(Q) U(z P_0).
Block2 functional_derivative_residual(const Trajectory& traj, const VectorPolynomial& Q,
                                      double t);

/// U_0 with enough moment orders to sum the exponential series, plus the
/// constants of the tail bound |U_0(z^n P_0)| <= kappa rho^n.
struct ExponentialFunctional {
  MomentFunctional base;
  NormBound rho;
  double kappa = 1.0;  ///< ||C_0||_inf ||C_0^{-1}||_inf
};

inline constexpr std::size_t kExponentialTermCap = 200;

/// Smallest K with kappa rho^n_max sum_{j >= K} (|t| rho)^j / j! <= tol.
/// Throws SeriesCapExceeded above kExponentialTermCap.
std::size_t exponential_terms(const NormBound& rho, double kappa, double t, std::size_t n_max,
                              double tol);
/// The certified tail for K retained terms at order k.
double exponential_tail_bound(const NormBound& rho, double kappa, double t, std::size_t k,
                              std::size_t terms);

/// Builds U_0 from J_0 with orders up to n_max + exponential_terms(t_max).
ExponentialFunctional make_exponential_functional(const BandedOperator& J0, double t_max,
                                                  std::size_t n_max, double tol = 1e-12);

struct ExponentialMoments {
  MomentFunctional moments;
  std::size_t terms = 0;
  double tail_bound = 0.0;
};

/// Moments of (e^{zt} U_0)_M with M = [(e^{zt} U_0)(P_0)]^{-1}:
/// raw_k = sum_j t^j / j! U_0(z^{k+j} P_0), moment_k = raw_k raw_0^{-1}.
/// Throws SingularBlock if raw_0 is singular, OrderOverflow if the base
/// functional has too few moments.
ExponentialMoments exponential_moments(const ExponentialFunctional& U0, double t,
                                       std::size_t n_max, double tol = 1e-12);

}  // namespace ktoda
