#include "ktoda/moments.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace ktoda {

MomentFunctional::MomentFunctional(std::vector<Block2> moments) : moments_(std::move(moments)) {
  if (moments_.empty()) throw InvalidArgument("MomentFunctional: moment 0 is required");
}

const Block2& MomentFunctional::moment(std::size_t k) const {
  if (k >= moments_.size()) {
    std::ostringstream os;
    os << "moment of order " << k << " requested, functional holds orders 0.." << max_order();
    throw OrderOverflow(os.str());
  }
  return moments_[k];
}

namespace {

Block2 c0_inverse(Complex a1) {
  Block2 inv = Block2::Identity();
  inv(1, 0) = a1;
  return inv;
}

}  // namespace

MomentFunctional moments_from_J(const BandedOperator& J, std::size_t n_max, Truncation policy) {
  if (policy == Truncation::local && J.dimension() < n_max + 2) {
    std::ostringstream os;
    os << "n_max: moments up to order " << n_max << " need m >= " << n_max + 2
       << ", have m = " << J.dimension();
    throw TruncationTooSmall(os.str());
  }
  const Complex a1 = J.state().a(1);
  const Block2 C0 = block_C0(J.state());
  const Block2 C0inv = c0_inverse(a1);
  auto powers = block_powers(J, n_max);
  for (auto& P : powers) P = C0inv * P * C0;
  return MomentFunctional(std::move(powers));
}

Block2 apply_U(const MomentFunctional& U, const VectorPolynomial& Q) {
  const std::size_t len = std::max(Q.top.coefficients().size(), Q.bottom.coefficients().size());
  Block2 out = Block2::Zero();
  for (std::size_t even = 0; even < len; even += 2) {
    Block2 E;
    E << Q.top.coefficient(even), Q.top.coefficient(even + 1), Q.bottom.coefficient(even),
        Q.bottom.coefficient(even + 1);
    if (E.isZero(0.0)) continue;
    out += E * U.moment(even);
  }
  return out;
}

namespace {

// Coefficients of P_0 and P_1 in the expansion of z^d over the monic basis
// P_0..P_d.
std::pair<Complex, Complex> low_coordinates(const std::vector<Polynomial>& P, std::size_t d) {
  std::vector<Complex> r(d + 1);
  r[d] = 1.0;
  Complex alpha0{}, alpha1{};
  for (std::size_t k = d + 1; k-- > 0;) {
    const Complex alpha = r[k];
    if (k == 0) alpha0 = alpha;
    if (k == 1) alpha1 = alpha;
    const auto& pk = P[k].coefficients();
    for (std::size_t i = 0; i <= k; ++i) r[i] -= alpha * pk[i];
  }
  return {alpha0, alpha1};
}

}  // namespace

MomentFunctional moments_from_orthogonality(const LatticeState& s, std::size_t n_max) {
  if (n_max + 1 >= s.dimension()) {
    std::ostringstream os;
    os << "n_max: orthogonality route needs n_max + 1 < m, have m = " << s.dimension();
    throw TruncationTooSmall(os.str());
  }
  const auto P = scalar_sequence(s, n_max + 1);
  const Block2 C0 = block_C0(s);
  std::vector<Block2> moments;
  moments.reserve(n_max + 1);
  for (std::size_t j = 0; j <= n_max; ++j) {
    const auto [t0, t1] = low_coordinates(P, j);
    const auto [b0, b1] = low_coordinates(P, j + 1);
    Block2 E0;
    E0 << t0, t1, b0, b1;
    moments.push_back(E0 * C0);
  }
  return MomentFunctional(std::move(moments));
}

Block2 moment_ode_residual(const Trajectory& traj, std::size_t n, double t) {
  const std::size_t i = traj.interior_index(t);
  const Block2 rate = central_difference(traj, i, [n](const AugmentedState& s) {
    return moments_from_J(BandedOperator(s.state), n, Truncation::finite).moment(n);
  });
  const auto U = moments_from_J(BandedOperator(traj[i].state), n + 1, Truncation::finite);
  return rate - (U.moment(n + 1) - U.moment(n) * U.moment(1));
}

Block2 functional_derivative_residual(const Trajectory& traj, const VectorPolynomial& Q,
                                      double t) {
  const std::size_t i = traj.interior_index(t);
  const std::size_t order = Q.degree() + 1;
  const Block2 rate = central_difference(traj, i, [&](const AugmentedState& s) {
    return apply_U(moments_from_J(BandedOperator(s.state), order, Truncation::finite), Q);
  });
  const auto U = moments_from_J(BandedOperator(traj[i].state), order + 1, Truncation::finite);
  return rate - (apply_U(U, Q.shifted(1)) - apply_U(U, Q) * U.moment(1));
}

double exponential_tail_bound(const NormBound& rho, double kappa, double t, std::size_t k,
                              std::size_t terms) {
  const double x = std::abs(t) * rho.rho;
  if (x == 0.0) return terms == 0 ? kappa * std::pow(rho.rho, static_cast<double>(k)) : 0.0;
  const double K = static_cast<double>(terms);
  if (K + 1.0 <= x) return std::numeric_limits<double>::infinity();
  // x^K / K! * 1 / (1 - x / (K + 1)) bounds sum_{j >= K} x^j / j!
  const double log_term = K * std::log(x) - std::lgamma(K + 1.0);
  return kappa * std::pow(rho.rho, static_cast<double>(k)) * std::exp(log_term) /
         (1.0 - x / (K + 1.0));
}

std::size_t exponential_terms(const NormBound& rho, double kappa, double t, std::size_t n_max,
                              double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tol: must be > 0");
  for (std::size_t K = 1; K <= kExponentialTermCap; ++K)
    if (exponential_tail_bound(rho, kappa, t, n_max, K) <= tol) return K;
  std::ostringstream os;
  os << "exponential series needs more than " << kExponentialTermCap
     << " terms for tol = " << tol << " at t = " << t << " (rho = " << rho.rho << ")";
  throw SeriesCapExceeded(os.str());
}

namespace {

double conjugation_constant(Complex a1) {
  const double n = 1.0 + std::abs(a1);
  return n * n;
}

}  // namespace

ExponentialFunctional make_exponential_functional(const BandedOperator& J0, double t_max,
                                                  std::size_t n_max, double tol) {
  const NormBound rho = norm_bound(J0);
  const double kappa = conjugation_constant(J0.state().a(1));
  const std::size_t K = exponential_terms(rho, kappa, t_max, n_max, tol);
  return ExponentialFunctional{moments_from_J(J0, n_max + K, Truncation::finite), rho, kappa};
}

ExponentialMoments exponential_moments(const ExponentialFunctional& U0, double t,
                                       std::size_t n_max, double tol) {
  const std::size_t K = exponential_terms(U0.rho, U0.kappa, t, n_max, tol);
  if (U0.base.max_order() + 1 < n_max + K) {
    std::ostringstream os;
    os << "exponential series at t = " << t << " needs U_0 moments up to order "
       << n_max + K - 1 << ", have " << U0.base.max_order();
    throw OrderOverflow(os.str());
  }
  // weights[j] = t^j / j!
  std::vector<double> weights(K);
  weights[0] = 1.0;
  for (std::size_t j = 1; j < K; ++j) weights[j] = weights[j - 1] * t / static_cast<double>(j);

  std::vector<Block2> raw(n_max + 1, Block2::Zero());
  for (std::size_t k = 0; k <= n_max; ++k)
    for (std::size_t j = 0; j < K; ++j) raw[k] += weights[j] * U0.base.moment(k + j);

  const Complex det = raw[0].determinant();
  if (!(std::abs(det) > 1e-300)) {
    std::ostringstream os;
    os << "(e^{zt} U_0)(P_0) is singular at t = " << t << " (|det| = " << std::abs(det)
       << ", norm = " << inf_norm(raw[0]) << ")";
    throw SingularBlock(os.str());
  }
  const Block2 M = checked_inverse(raw[0]);
  std::vector<Block2> moments;
  moments.reserve(n_max + 1);
  moments.push_back(Block2::Identity());
  for (std::size_t k = 1; k <= n_max; ++k) moments.push_back(raw[k] * M);
  return ExponentialMoments{MomentFunctional(std::move(moments)), K,
                            exponential_tail_bound(U0.rho, U0.kappa, t, n_max, K)};
}

}  // namespace ktoda
