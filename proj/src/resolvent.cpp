#include "ktoda/resolvent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ktoda/polynomials.hpp"

namespace ktoda {

double neumann_tail_bound(double rho, double abs_z, std::size_t K) {
  if (!(abs_z > rho)) return std::numeric_limits<double>::infinity();
  return std::pow(rho / abs_z, static_cast<double>(K)) / (abs_z - rho);
}

void require_margin(const NormBound& rho, Complex z, double margin) {
  if (!(margin > 1.0)) throw InvalidArgument("margin: must be > 1");
  if (!(std::abs(z) >= margin * rho.rho)) {
    std::ostringstream os;
    os << "|z| = " << std::abs(z) << " is below " << margin << " * rho = " << margin * rho.rho;
    throw ZTooSmall(os.str());
  }
}

ResolventBlock resolvent_block(const BandedOperator& J, Complex z, double tol, double margin) {
  if (!(tol > 0.0)) throw InvalidArgument("tol: must be > 0");
  const NormBound rho = norm_bound(J);
  require_margin(rho, z, margin);
  const double abs_z = std::abs(z);
  // smallest K with (rho/|z|)^K <= tol (|z| - rho)
  const double ratio = rho.rho / abs_z;
  double K_real = std::ceil(std::log(tol * (abs_z - rho.rho)) / std::log(ratio));
  if (!(K_real >= 1.0)) K_real = 1.0;
  if (K_real > static_cast<double>(kNeumannTermCap))
    throw SeriesCapExceeded("resolvent_block: Neumann series needs too many terms");
  std::size_t K = static_cast<std::size_t>(K_real);
  while (K > 1 && neumann_tail_bound(rho.rho, abs_z, K - 1) <= tol) --K;
  while (neumann_tail_bound(rho.rho, abs_z, K) > tol) ++K;

  const auto powers = block_powers(J, K - 1);
  const Complex w = 1.0 / z;
  Complex scale = w;
  Block2 sum = Block2::Zero();
  for (const auto& P : powers) {
    sum += scale * P;
    scale *= w;
  }
  return ResolventBlock{z, sum, K, neumann_tail_bound(rho.rho, abs_z, K)};
}

DenseMatrix dense_resolvent(const BandedOperator& J, Complex z) {
  const auto m = static_cast<Eigen::Index>(J.dimension());
  const DenseMatrix A = z * DenseMatrix::Identity(m, m) - J.dense();
  return A.partialPivLu().inverse();
}

Block2 dense_resolvent_block(const BandedOperator& J, Complex z) {
  return dense_resolvent(J, z).topLeftCorner<2, 2>();
}

namespace {

Block2 c0_inverse(const LatticeState& s) {
  Block2 inv = Block2::Identity();
  inv(1, 0) = s.a(1);
  return inv;
}

Block2 lower_corner(const LatticeState& s) {
  Block2 L = Block2::Zero();
  L(1, 0) = s.b(1);
  return L;
}

}  // namespace

Block2 generating_function(const BandedOperator& J, Complex z, double tol, double margin) {
  const Block2 R = resolvent_block(J, z, tol, margin).value;
  return c0_inverse(J.state()) * R * block_C0(J.state());
}

Block2 generating_function_from_moments(const MomentFunctional& U, Complex zeta) {
  const Complex w = 1.0 / zeta;
  Complex scale = w;
  Block2 sum = Block2::Zero();
  for (const auto& m : U.moments()) {
    sum += scale * m;
    scale *= w;
  }
  return sum;
}

Block2 resolvent_ode_residual(const Trajectory& traj, Complex z, double t, double tol,
                              double margin) {
  const std::size_t i = traj.interior_index(t);
  const Block2 rate = central_difference(traj, i, [&](const AugmentedState& s) {
    return resolvent_block(BandedOperator(s.state), z, tol, margin).value;
  });
  const BandedOperator J(traj[i].state);
  const Block2 R = resolvent_block(J, z, tol, margin).value;
  const Block2 B1 = block_at(J, 1, 1);
  const Block2 L = lower_corner(J.state());
  const Block2 I = Block2::Identity();
  return rate - (R * (z * I - B1) - I + R * L - L * R);
}

Block2 generating_ode_residual(const Trajectory& traj, Complex zeta, double t, double tol,
                               double margin) {
  const std::size_t i = traj.interior_index(t);
  const Block2 rate = central_difference(traj, i, [&](const AugmentedState& s) {
    return generating_function(BandedOperator(s.state), zeta, tol, margin);
  });
  const BandedOperator J(traj[i].state);
  const Block2 F = generating_function(J, zeta, tol, margin);
  const Block2 m1 = c0_inverse(J.state()) * block_at(J, 1, 1) * block_C0(J.state());
  const Block2 I = Block2::Identity();
  return rate - (F * (zeta * I - m1) - I);
}

std::vector<Block2> laurent_coefficients(const std::function<Block2(Complex)>& f,
                                         double radius, std::size_t count,
                                         std::size_t points) {
  if (!(radius > 0.0)) throw InvalidArgument("radius: must be > 0");
  if (points < count + 1) throw InvalidArgument("points: too few for the requested count");
  std::vector<Block2> coeffs(count, Block2::Zero());
  for (std::size_t k = 0; k < points; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(points);
    const Complex zeta = std::polar(radius, theta);
    const Block2 value = f(zeta);
    Complex power = zeta;  // zeta^{n+1}
    for (std::size_t n = 0; n < count; ++n) {
      coeffs[n] += power * value;
      power *= zeta;
    }
  }
  for (auto& c : coeffs) c /= static_cast<double>(points);
  return coeffs;
}

Block2 quadrature_block(const AugmentedState& s) {
  const Complex e1 = std::exp(s.q1);
  Block2 N;
  N << e1, e1 * s.q3, 0.0, std::exp(s.q2);
  return N;
}

namespace {

// Extended state: the packed augmented state followed by the entries of M
// in column-major order.
constexpr Eigen::Index kMEntries = 4;

Block2 read_M(const ComplexVector& y, Eigen::Index offset) {
  Block2 M;
  M << y(offset), y(offset + 2), y(offset + 1), y(offset + 3);
  return M;
}

void write_M(ComplexVector& y, Eigen::Index offset, const Block2& M) {
  y(offset) = M(0, 0);
  y(offset + 1) = M(1, 0);
  y(offset + 2) = M(0, 1);
  y(offset + 3) = M(1, 1);
}

Block2 closed_form_value(const AugmentedState& s, const Block2& M, Complex z, double tau) {
  const Block2 N = quadrature_block(s);
  const Complex det = N.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(std::abs(det))) {
    std::ostringstream os;
    os << "N(t) is numerically singular at t = " << s.time() << " (|det| = " << std::abs(det)
       << ")";
    throw SingularBlock(os.str());
  }
  return std::exp(z * tau) * block_C0(s.state) * M * N.inverse();
}

}  // namespace

std::vector<ClosedFormSample> closed_form_resolvent(const Trajectory& traj, Complex z,
                                                    double tol, double margin) {
  const AugmentedState& s0 = traj.front();
  const std::size_t m = s0.state.dimension();
  const double t0 = s0.time();
  const double h = traj.step();
  const auto base = static_cast<Eigen::Index>(3 * m);

  const Block2 R0 = resolvent_block(BandedOperator(s0.state), z, tol, margin).value;
  const Block2 M0 = c0_inverse(s0.state) * R0;

  ComplexVector y(base + kMEntries);
  y.head(base) = detail::pack(s0);
  write_M(y, base, M0);

  const CorruptionSpec flow = traj.flow();
  auto rhs = [&](const ComplexVector& v, double tau) {
    ComplexVector dv(v.size());
    detail::augmented_rhs(v, m, flow, dv);
    const Complex* p = v.data();
    Block2 N;
    const Complex e1 = std::exp(p[3 * m - 3]);
    N << e1, e1 * p[3 * m - 1], 0.0, std::exp(p[3 * m - 2]);
    Block2 C0inv = Block2::Identity();
    C0inv(1, 0) = p[0];
    write_M(dv, base, (-std::exp(-z * tau)) * C0inv * N);
    return dv;
  };

  std::vector<ClosedFormSample> out;
  out.reserve(traj.size());
  out.push_back({t0, closed_form_value(s0, M0, z, 0.0), M0, quadrature_block(s0), s0});
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double tau = static_cast<double>(i - 1) * h;
    // Same stage arithmetic as detail::rk4_step, with stage times for M.
    const ComplexVector k1 = rhs(y, tau);
    const ComplexVector k2 = rhs((y + 0.5 * h * k1).eval(), tau + 0.5 * h);
    const ComplexVector k3 = rhs((y + 0.5 * h * k2).eval(), tau + 0.5 * h);
    const ComplexVector k4 = rhs((y + h * k3).eval(), tau + h);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "closed form: state became non-finite at t = " << traj.time(i);
      throw NonFiniteState(os.str());
    }
    const double t = traj.time(i);
    AugmentedState s = detail::unpack(y.head(base), m, t);
    const Block2 M = read_M(y, base);
    const double elapsed = static_cast<double>(i) * h;
    out.push_back({t, closed_form_value(s, M, z, elapsed), M, quadrature_block(s), std::move(s)});
  }
  return out;
}

}  // namespace ktoda
