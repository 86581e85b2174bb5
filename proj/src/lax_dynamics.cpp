#include "ktoda/lax_dynamics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace ktoda {

std::string_view to_string(Distortion kind) {
  switch (kind) {
    case Distortion::none: return "none";
    case Distortion::freeze_b: return "freeze-b";
    case Distortion::scale_c_rhs: return "scale-c-rhs";
    case Distortion::drop_commutator_term: return "drop-commutator-term";
  }
  return "none";
}

std::optional<Distortion> parse_distortion(std::string_view name) {
  for (auto kind : {Distortion::none, Distortion::freeze_b, Distortion::scale_c_rhs,
                    Distortion::drop_commutator_term})
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

namespace {

// Shared by kostant_rhs and the packed RK4 right-hand side.  Index k is
// 0-based, so a[k] = a_{k+1}.
void lattice_rates(std::span<const Complex> a, std::span<const Complex> b,
                   std::span<const Complex> c, const CorruptionSpec& corruption,
                   std::span<Complex> da, std::span<Complex> db, std::span<Complex> dc) {
  const std::size_t m = a.size();
  double b_scale = 1.0;
  double c_scale = 1.0;
  double comm_scale = 1.0;
  switch (corruption.kind) {
    case Distortion::none: break;
    case Distortion::freeze_b: b_scale = 1.0 - corruption.magnitude; break;
    case Distortion::scale_c_rhs: c_scale = 1.0 + corruption.magnitude; break;
    case Distortion::drop_commutator_term: comm_scale = 1.0 - corruption.magnitude; break;
  }

  for (std::size_t k = 0; k < m; ++k) {
    const Complex b_here = k < m - 1 ? b[k] : Complex{};
    const Complex b_prev = k > 0 ? b[k - 1] : Complex{};
    da[k] = b_here - b_prev;
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const Complex c_here = k < m - 2 ? c[k] : Complex{};
    const Complex c_prev = k > 0 ? c[k - 1] : Complex{};
    db[k] = b_scale * (comm_scale * b[k] * (a[k + 1] - a[k]) + c_here - c_prev);
  }
  for (std::size_t k = 0; k + 2 < m; ++k)
    dc[k] = c_scale * comm_scale * c[k] * (a[k + 2] - a[k]);
}

}  // namespace

LatticeRates kostant_rhs(const LatticeState& s, const CorruptionSpec& corruption) {
  const std::size_t m = s.dimension();
  LatticeRates r{std::vector<Complex>(m), std::vector<Complex>(m - 1),
                 std::vector<Complex>(m - 2)};
  lattice_rates(s.diagonal(), s.subdiagonal(), s.second_subdiagonal(), corruption, r.a, r.b,
                r.c);
  return r;
}

DenseMatrix lax_rhs(const BandedOperator& J) { return commutator(J.dense(), J.strictly_lower()); }

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw InvalidArgument("h: step must be > 0");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end))
    throw InvalidArgument("t_end: must be >= 0");
  if (!(cfg.c_floor >= 0.0)) throw InvalidArgument("c_floor: must be >= 0");
  if (cfg.corruption.kind != Distortion::none && !(cfg.corruption.magnitude > 0.0))
    throw InvalidArgument("magnitude: corruption magnitude must be > 0");
  const double steps = cfg.t_end / cfg.h;
  if (std::abs(steps - std::round(steps)) > 1e-6) {
    std::ostringstream os;
    os << "t_end: " << cfg.t_end << " is not an integer multiple of h = " << cfg.h;
    throw InvalidArgument(os.str());
  }
}

std::size_t step_count(const IntegratorConfig& cfg) {
  validate(cfg);
  return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.h));
}

Trajectory::Trajectory(double h, CorruptionSpec flow, std::vector<AugmentedState> samples)
    : h_(h), flow_(flow), samples_(std::move(samples)) {
  if (samples_.empty()) throw InvalidArgument("trajectory: no samples");
  if (!(h_ > 0.0)) throw InvalidArgument("h: step must be > 0");
}

double Trajectory::time(std::size_t i) const {
  return samples_.front().time() + static_cast<double>(i) * h_;
}

std::size_t Trajectory::index_of(double t) const {
  const double x = (t - samples_.front().time()) / h_;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-6 || r < 0.0 || r >= static_cast<double>(samples_.size())) {
    std::ostringstream os;
    os << "t = " << t << " is not a sample time of the trajectory";
    throw GridError(os.str());
  }
  return static_cast<std::size_t>(r);
}

std::size_t Trajectory::interior_index(double t) const {
  const std::size_t i = index_of(t);
  if (i == 0 || i + 1 >= samples_.size()) {
    std::ostringstream os;
    os << "t = " << t << " is too close to the trajectory ends for a central difference";
    throw GridError(os.str());
  }
  return i;
}

NormBound Trajectory::max_norm_bound() const {
  double rho = 0.0;
  for (const auto& s : samples_) rho = std::max(rho, norm_bound(BandedOperator(s.state)).rho);
  return NormBound{rho};
}

namespace detail {

ComplexVector pack(const AugmentedState& s) {
  const std::size_t m = s.state.dimension();
  ComplexVector y(static_cast<Eigen::Index>(3 * m));
  Eigen::Index k = 0;
  for (const auto& x : s.state.diagonal()) y(k++) = x;
  for (const auto& x : s.state.subdiagonal()) y(k++) = x;
  for (const auto& x : s.state.second_subdiagonal()) y(k++) = x;
  y(k++) = s.q1;
  y(k++) = s.q2;
  y(k++) = s.q3;
  return y;
}

AugmentedState unpack(const ComplexVector& y, std::size_t m, double t) {
  const auto* p = y.data();
  std::vector<Complex> a(p, p + m);
  std::vector<Complex> b(p + m, p + 2 * m - 1);
  std::vector<Complex> c(p + 2 * m - 1, p + 3 * m - 3);
  AugmentedState s{LatticeState(std::move(a), std::move(b), std::move(c), t)};
  s.q1 = p[3 * m - 3];
  s.q2 = p[3 * m - 2];
  s.q3 = p[3 * m - 1];
  return s;
}

void augmented_rhs(const ComplexVector& y, std::size_t m, const CorruptionSpec& corruption,
                   ComplexVector& dy) {
  const Complex* p = y.data();
  Complex* d = dy.data();
  lattice_rates({p, m}, {p + m, m - 1}, {p + 2 * m - 1, m - 2}, corruption, {d, m},
                {d + m, m - 1}, {d + 2 * m - 1, m - 2});
  const Complex q1 = p[3 * m - 3];
  const Complex q2 = p[3 * m - 2];
  d[3 * m - 3] = p[0];
  d[3 * m - 2] = p[1];
  d[3 * m - 1] = std::exp(q2 - q1);
}

}  // namespace detail

namespace {

void check_state(const ComplexVector& y, std::size_t m, double t, double c_floor) {
  if (!y.allFinite()) {
    std::ostringstream os;
    os << "state became non-finite at t = " << t;
    throw NonFiniteState(os.str());
  }
  if (c_floor <= 0.0) return;
  for (std::size_t k = 0; k + 2 < m; ++k) {
    const double mag = std::abs(y(static_cast<Eigen::Index>(2 * m - 1 + k)));
    if (mag < c_floor) throw CNearZero(t, k + 1, mag);
  }
}

}  // namespace

Trajectory integrate(const AugmentedState& s0, const IntegratorConfig& cfg) {
  const std::size_t steps = step_count(cfg);
  const std::size_t m = s0.state.dimension();
  const double t0 = s0.time();

  ComplexVector y = detail::pack(s0);
  check_state(y, m, t0, cfg.c_floor);

  auto rhs = [&](const ComplexVector& v) {
    ComplexVector dv(v.size());
    detail::augmented_rhs(v, m, cfg.corruption, dv);
    return dv;
  };

  std::vector<AugmentedState> samples;
  samples.reserve(steps + 1);
  samples.push_back(s0);
  for (std::size_t i = 1; i <= steps; ++i) {
    y = detail::rk4_step(y, cfg.h, rhs);
    const double t = t0 + static_cast<double>(i) * cfg.h;
    check_state(y, m, t, cfg.c_floor);
    samples.push_back(detail::unpack(y, m, t));
  }
  return Trajectory(cfg.h, cfg.corruption, std::move(samples));
}

Block2 block_power_residual(const Trajectory& traj, std::size_t n, double t) {
  const std::size_t i = traj.interior_index(t);
  const Block2 rate = central_difference(traj, i, [n](const AugmentedState& s) {
    return block_powers(BandedOperator(s.state), n)[n];
  });
  const BandedOperator J(traj[i].state);
  const auto powers = block_powers(J, n + 1);
  const Block2 B1 = block_at(J, 1, 1);
  Block2 L11 = Block2::Zero();
  L11(1, 0) = J.state().b(1);
  const Block2& Pn = powers[n];
  return rate - (powers[n + 1] - Pn * B1 + Pn * L11 - L11 * Pn);
}

}  // namespace ktoda
