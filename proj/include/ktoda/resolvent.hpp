#pragma once

// Block resolvent R_J(z) = ((zI - J)^{-1})_11 by Neumann series, the moment
// generating function F_J, their evolution laws, and the closed form
// exp(zt) C_0 M(t, z) N(t)^{-1} built from quadratures along a trajectory.

#include <cstddef>
#include <functional>
#include <vector>

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"
#include "ktoda/moments.hpp"

namespace ktoda {

inline constexpr double kDefaultZMargin = 1.5;
inline constexpr double kDefaultResolventTol = 1e-14;
inline constexpr std::size_t kNeumannTermCap = 100000;

struct ResolventBlock {
  Complex z{};
  Block2 value = Block2::Zero();
  std::size_t terms_used = 0;  ///< powers J^0 .. J^{terms_used - 1}
  double tail_bound = 0.0;
};

/// Bound on the infinity norm of sum_{n >= K} (J^n)_11 / z^{n+1}, given
/// ||J||_inf <= rho < |z|: (rho/|z|)^K / (|z| - rho).
double neumann_tail_bound(double rho, double abs_z, std::size_t K);

/// Throws ZTooSmall unless |z| >= margin * rho.
void require_margin(const NormBound& rho, Complex z, double margin);

/// Partial Neumann sum with the smallest K whose tail bound is <= tol.
ResolventBlock resolvent_block(const BandedOperator& J, Complex z,
                               double tol = kDefaultResolventTol,
                               double margin = kDefaultZMargin);

/// (zI - J)^{-1} of the truncation by LU with partial pivoting.
DenseMatrix dense_resolvent(const BandedOperator& J, Complex z);
Block2 dense_resolvent_block(const BandedOperator& J, Complex z);

/// C_0^{-1} R_J(z) C_0.
Block2 generating_function(const BandedOperator& J, Complex z,
                           double tol = kDefaultResolventTol,
                           double margin = kDefaultZMargin);

/// sum_{n <= max_order} U(z^n P_0) / zeta^{n+1}.
Block2 generating_function_from_moments(const MomentFunctional& U, Complex zeta);

/// d/dt R_J(z) by central differences minus
/// R_J(z) (z I - B_1) - I + [R_J(z), (J_-)_11].
Block2 resolvent_ode_residual(const Trajectory& traj, Complex z, double t,
                              double tol = kDefaultResolventTol,
                              double margin = kDefaultZMargin);

/// d/dt F_J(zeta) by central differences minus
/// F_J(zeta) (zeta I - U(z P_0)) - I.
Block2 generating_ode_residual(const Trajectory& traj, Complex zeta, double t,
                               double tol = kDefaultResolventTol,
                               double margin = kDefaultZMargin);

/// Coefficients of zeta^{-(n+1)}, n = 0..count-1, of a function analytic
/// outside the circle |zeta| = radius, by the trapezoid rule on that circle.
std::vector<Block2> laurent_coefficients(const std::function<Block2(Complex)>& f,
                                         double radius, std::size_t count,
                                         std::size_t points = 128);

struct ClosedFormSample {
  double t = 0.0;
  Block2 value = Block2::Zero();  ///< exp(z t) C_0 M N^{-1}
  Block2 M = Block2::Zero();
  Block2 N = Block2::Identity();
  AugmentedState state;           ///< lattice and quadratures from the joint integration
};

/// N(t) = [[e^{q1}, e^{q1} q3], [0, e^{q2}]].
Block2 quadrature_block(const AugmentedState& s);

/// Re-integrates the trajectory's initial state jointly with
/// M' = -exp(-z s) C_0(s)^{-1} N(s), M(0) = C_0(0)^{-1} R_{J(0)}(z), on the
/// same grid and with the same flow, and assembles the closed form at
/// every sample.  Time is measured from the trajectory's first sample.
std::vector<ClosedFormSample> closed_form_resolvent(const Trajectory& traj, Complex z,
                                                    double tol = kDefaultResolventTol,
                                                    double margin = kDefaultZMargin);

}  // namespace ktoda
