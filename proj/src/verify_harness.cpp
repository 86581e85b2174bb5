#include "ktoda/verify_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

#include "ktoda/moments.hpp"
#include "ktoda/polynomials.hpp"
#include "ktoda/resolvent.hpp"

namespace ktoda {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Complex disk_uniform(std::mt19937_64& rng, double radius) {
  for (;;) {
    const double x = 2.0 * unit_uniform(rng) - 1.0;
    const double y = 2.0 * unit_uniform(rng) - 1.0;
    if (x * x + y * y <= 1.0) return {radius * x, radius * y};
  }
}

LatticeState random_state(std::mt19937_64& rng, std::size_t m, const GeneratorConfig& gen) {
  if (m < 4 || m % 2 != 0) throw InvalidArgument("m: must be even and >= 4");
  if (!(gen.c_min < gen.radius)) throw InvalidArgument("c_min: must be below the radius");
  std::vector<Complex> a(m), b(m - 1), c(m - 2);
  for (auto& x : a) x = disk_uniform(rng, gen.radius);
  for (auto& x : b) x = disk_uniform(rng, gen.radius);
  for (auto& x : c) {
    do x = disk_uniform(rng, gen.radius);
    while (std::abs(x) < gen.c_min);
  }
  return LatticeState(std::move(a), std::move(b), std::move(c));
}

LatticeState fixed_point_state(std::size_t m, Complex alpha) {
  return LatticeState(std::vector<Complex>(m, alpha), std::vector<Complex>(m - 1),
                      std::vector<Complex>(m - 2));
}

BoundedInstance make_bounded_instance(std::uint64_t seed, std::size_t m, double h,
                                      double t_end, const GeneratorConfig& gen) {
  std::mt19937_64 rng(seed);
  IntegratorConfig cfg;
  cfg.h = h;
  cfg.t_end = t_end;
  validate(cfg);
  for (std::size_t draw = 1; draw <= gen.max_draws; ++draw) {
    LatticeState s = random_state(rng, m, gen);
    try {
      Trajectory traj = integrate(AugmentedState::at_rest(std::move(s)), cfg);
      bool bounded = true;
      for (const auto& sample : traj.samples())
        if (sample.state.max_abs_entry() > gen.bound) {
          bounded = false;
          break;
        }
      if (bounded) return BoundedInstance{seed, draw, std::move(traj)};
    } catch (const NonFiniteState&) {
    } catch (const CNearZero&) {
    }
  }
  throw NonFiniteState("make_bounded_instance: no bounded draw for seed " +
                       std::to_string(seed));
}

CheckReport make_report(std::string id, const InstanceDescriptor& instance,
                        double max_residual, double threshold, bool expect_fail,
                        double runtime_seconds) {
  return CheckReport{std::move(id), instance,    max_residual,
                     threshold,     max_residual <= threshold,
                     expect_fail,   runtime_seconds};
}

std::vector<std::size_t> sample_indices(const Trajectory& traj, std::size_t count) {
  if (traj.size() < 3) throw GridError("trajectory too short for interior samples");
  const std::size_t steps = traj.size() - 1;
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.5 : 0.1 + 0.8 * static_cast<double>(k) /
                                                     static_cast<double>(count - 1);
    auto i = static_cast<std::size_t>(std::llround(frac * static_cast<double>(steps)));
    i = std::clamp<std::size_t>(i, 1, steps - 1);
    if (out.empty() || out.back() != i) out.push_back(i);
  }
  return out;
}

std::vector<Complex> ring(double radius, std::size_t count, double offset) {
  std::vector<Complex> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(std::polar(radius, 2.0 * std::numbers::pi * (static_cast<double>(k) + offset) /
                                         static_cast<double>(count)));
  return out;
}

InstanceDescriptor describe(const Trajectory& traj, std::uint64_t seed,
                            const std::vector<std::size_t>& indices) {
  InstanceDescriptor d{seed, traj.front().state.dimension(), traj.step(), traj.time(0),
                       traj.time(traj.size() - 1)};
  if (!indices.empty()) {
    d.t_begin = traj.time(*std::min_element(indices.begin(), indices.end()));
    d.t_end = traj.time(*std::max_element(indices.begin(), indices.end()));
  }
  return d;
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs body, which returns a max residual, and wraps the result.  A
// numerical abort becomes an infinite residual.
CheckReport timed(std::string id, const InstanceDescriptor& d, double threshold,
                  bool expect_fail, const std::function<double()>& body) {
  const auto start = Clock::now();
  double r = 0.0;
  try {
    r = body();
  } catch (const NonFiniteState&) {
    r = std::numeric_limits<double>::infinity();
  } catch (const SingularBlock&) {
    r = std::numeric_limits<double>::infinity();
  }
  if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return make_report(std::move(id), d, r, threshold, expect_fail, secs);
}

double vec_max_abs(const Vector2& v) { return v.cwiseAbs().maxCoeff(); }

double z_radius(const Trajectory& traj, const Sampling& sampling) {
  return sampling.radius_factor * traj.max_norm_bound().rho;
}

std::size_t polynomial_order_cap(const Trajectory& traj, std::size_t n_max) {
  const std::size_t m = traj.front().state.dimension();
  return std::min(n_max, (m - 2) / 2);
}

double polynomial_law_max(const Trajectory& traj, const Sampling& sampling,
                          const std::vector<std::size_t>& idx) {
  const auto z0s = ring(sampling.z0_radius, sampling.z0_angles, 0.125);
  double r = 0.0;
  for (std::size_t n = 0; n <= polynomial_order_cap(traj, sampling.n_max); ++n)
    for (auto i : idx)
      for (auto z0 : z0s) r = std::max(r, vec_max_abs(derivative_law_residual(traj, n, traj.time(i), z0)));
  return r;
}

VectorPolynomial random_vector_polynomial(std::uint64_t seed, std::size_t degree) {
  std::mt19937_64 rng(seed);
  std::vector<Complex> top(degree + 1), bottom(degree + 1);
  for (auto& x : top) x = disk_uniform(rng, 1.0);
  for (auto& x : bottom) x = disk_uniform(rng, 1.0);
  return {Polynomial(std::move(top)), Polynomial(std::move(bottom))};
}

}  // namespace

std::vector<CheckReport> check_theorem1(const Trajectory& traj, std::uint64_t seed,
                                        const Sampling& sampling, bool expect_fail) {
  const auto idx = sample_indices(traj, sampling.t_samples);
  const auto d = describe(traj, seed, idx);
  const double fd = thresholds::finite_difference;
  std::vector<CheckReport> out;

  out.push_back(timed("thm1.block_power_law", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (std::size_t n = 0; n <= sampling.n_max; ++n)
      for (auto i : idx) r = std::max(r, max_abs(block_power_residual(traj, n, traj.time(i))));
    return r;
  }));
  out.push_back(timed("thm1.resolvent_law", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (auto z : ring(z_radius(traj, sampling), sampling.angles))
      for (auto i : idx) r = std::max(r, max_abs(resolvent_ode_residual(traj, z, traj.time(i))));
    return r;
  }));
  out.push_back(timed("thm1.polynomial_law", d, fd, expect_fail,
                      [&] { return polynomial_law_max(traj, sampling, idx); }));
  return out;
}

std::vector<CheckReport> check_theorem2(const Trajectory& traj, std::uint64_t seed,
                                        const Sampling& sampling, bool expect_fail) {
  const auto idx = sample_indices(traj, sampling.t_samples);
  const auto d = describe(traj, seed, idx);
  const double fd = thresholds::finite_difference;
  std::vector<CheckReport> out;

  out.push_back(timed("thm2.a1_rate", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const Complex rate = (traj[i + 1].state.a(1) - traj[i - 1].state.a(1)) / (2.0 * traj.step());
      r = std::max(r, std::abs(rate - traj[i].state.b(1)));
    }
    return r;
  }));
  out.push_back(timed("thm2.moment_law", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (std::size_t n = 0; n <= sampling.n_max; ++n)
      for (auto i : idx) r = std::max(r, max_abs(moment_ode_residual(traj, n, traj.time(i))));
    return r;
  }));
  out.push_back(timed("thm2.generating_law", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (auto zeta : ring(z_radius(traj, sampling), sampling.angles))
      for (auto i : idx)
        r = std::max(r, max_abs(generating_ode_residual(traj, zeta, traj.time(i))));
    return r;
  }));
  out.push_back(timed("thm2.functional_law", d, fd, expect_fail, [&] {
    double r = 0.0;
    for (std::size_t degree : {std::size_t{3}, 2 * sampling.n_max + 1}) {
      const auto Q = random_vector_polynomial(seed * 7919 + degree, degree);
      for (auto i : idx)
        r = std::max(r, max_abs(functional_derivative_residual(traj, Q, traj.time(i))));
    }
    return r;
  }));
  out.push_back(timed("thm2.polynomial_law", d, fd, expect_fail,
                      [&] { return polynomial_law_max(traj, sampling, idx); }));
  out.push_back(timed("thm2.laurent_consistency", d, thresholds::laurent, expect_fail, [&] {
    constexpr std::size_t orders = 4;
    const double radius = z_radius(traj, sampling);
    double r = 0.0;
    for (auto i : idx) {
      const double t = traj.time(i);
      const auto coeffs = laurent_coefficients(
          [&](Complex zeta) { return generating_ode_residual(traj, zeta, t); }, radius, orders);
      for (std::size_t n = 0; n < orders; ++n)
        r = std::max(r, max_abs((coeffs[n] - moment_ode_residual(traj, n, t)).eval()));
    }
    return r;
  }));
  return out;
}

namespace {

double closed_form_gap(const Trajectory& traj, const std::vector<Complex>& zs,
                       const std::vector<std::size_t>& idx) {
  double r = 0.0;
  for (auto z : zs) {
    const auto closed = closed_form_resolvent(traj, z);
    for (auto i : idx) {
      const Block2 direct = resolvent_block(BandedOperator(traj[i].state), z).value;
      r = std::max(r, max_abs((closed[i].value - direct).eval()));
    }
  }
  return r;
}

}  // namespace

std::vector<CheckReport> check_corollaries(const Trajectory& traj, std::uint64_t seed,
                                           const Sampling& sampling, bool expect_fail) {
  auto idx = sample_indices(traj, sampling.t_samples);
  const std::size_t last = traj.size() - 1;
  idx.push_back(last / 2);
  idx.push_back(last);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  const auto d = describe(traj, seed, idx);
  const auto zs = ring(z_radius(traj, sampling), sampling.angles);
  std::vector<CheckReport> out;

  out.push_back(timed("cor1.initial", describe(traj, seed, {0}), thresholds::roundoff,
                      expect_fail, [&] {
    double r = 0.0;
    const Trajectory start(traj.step(), traj.flow(), {traj.front()});
    const BandedOperator J0(traj.front().state);
    for (auto z : zs) {
      const auto closed = closed_form_resolvent(start, z);
      r = std::max(r, max_abs((closed.front().value - resolvent_block(J0, z).value).eval()));
    }
    return r;
  }));
  out.push_back(timed("cor1.agreement", d, thresholds::closed_form, expect_fail,
                      [&] { return closed_form_gap(traj, zs, idx); }));

  constexpr std::size_t kOrders = 5;
  const std::size_t orders = std::max(kOrders, sampling.n_max);
  const double horizon = traj.time(last) - traj.time(0);
  double tail = 0.0;
  out.push_back(timed("cor2.agreement", d, thresholds::exponential, expect_fail, [&] {
    const auto U0 = make_exponential_functional(BandedOperator(traj.front().state), horizon,
                                                orders, thresholds::exponential_tail);
    double r = 0.0;
    for (auto i : idx) {
      const auto series = exponential_moments(U0, traj.time(i) - traj.time(0), orders,
                                              thresholds::exponential_tail);
      tail = std::max(tail, series.tail_bound);
      const auto direct = moments_from_J(BandedOperator(traj[i].state), orders, Truncation::finite);
      for (std::size_t k = 0; k <= orders; ++k)
        r = std::max(r, max_abs((series.moments.moment(k) - direct.moment(k)).eval()));
    }
    return r;
  }));
  out.push_back(make_report("cor2.tail_bound", d, tail, thresholds::exponential_tail,
                            expect_fail, 0.0));
  return out;
}

double spectral_drift(const Trajectory& traj, const std::vector<std::size_t>& indices) {
  using Solver = Eigen::ComplexEigenSolver<DenseMatrix>;
  const ComplexVector ref = Solver(BandedOperator(traj.front().state).dense(), false).eigenvalues();
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  double drift = 0.0;
  for (auto i : indices) {
    ComplexVector ev = Solver(BandedOperator(traj[i].state).dense(), false).eigenvalues();
    std::vector<bool> used(static_cast<std::size_t>(ev.size()), false);
    for (Eigen::Index k = 0; k < ref.size(); ++k) {
      double best = std::numeric_limits<double>::infinity();
      Eigen::Index pick = 0;
      for (Eigen::Index j = 0; j < ev.size(); ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double dist = std::abs(ev(j) - ref(k));
        if (dist < best) {
          best = dist;
          pick = j;
        }
      }
      used[static_cast<std::size_t>(pick)] = true;
      drift = std::max(drift, best / scale);
    }
  }
  return drift;
}

std::vector<CheckReport> check_lax(const Trajectory& traj, std::uint64_t seed,
                                   const Sampling& sampling, bool expect_fail) {
  auto idx = sample_indices(traj, sampling.t_samples);
  idx.push_back(traj.size() - 1);
  const auto d = describe(traj, seed, idx);
  std::vector<CheckReport> out;

  out.push_back(timed("lax.rhs_equivalence", d, thresholds::rhs_equivalence, expect_fail, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const BandedOperator J(traj[i].state);
      const auto rates = kostant_rhs(J.state());
      const auto m = static_cast<Eigen::Index>(J.dimension());
      DenseMatrix expected = DenseMatrix::Zero(m, m);
      for (Eigen::Index k = 0; k < m; ++k) expected(k, k) = rates.a[static_cast<std::size_t>(k)];
      for (Eigen::Index k = 0; k + 1 < m; ++k)
        expected(k + 1, k) = rates.b[static_cast<std::size_t>(k)];
      for (Eigen::Index k = 0; k + 2 < m; ++k)
        expected(k + 2, k) = rates.c[static_cast<std::size_t>(k)];
      r = std::max(r, max_abs((lax_rhs(J) - expected).eval()));
    }
    return r;
  }));
  out.push_back(timed("lax.isospectral", d, thresholds::isospectral, expect_fail,
                      [&] { return spectral_drift(traj, idx); }));
  return out;
}

namespace {

// n-fold product C_n ... C_0.
Block2 chain_product(const LatticeState& s, std::size_t n) {
  Block2 p = block_C0(s);
  for (std::size_t k = 1; k <= n; ++k) p = block_C(s, k) * p;
  return p;
}

}  // namespace

std::vector<CheckReport> check_algebra(const Trajectory& traj, std::uint64_t seed,
                                       const Sampling& sampling) {
  auto idx = sample_indices(traj, sampling.t_samples);
  idx.insert(idx.begin(), 0);
  const auto d = describe(traj, seed, idx);
  const double tol = thresholds::algebraic;
  const std::size_t n_top = polynomial_order_cap(traj, sampling.n_max);
  std::vector<CheckReport> out;

  out.push_back(timed("algebra.orthogonality", d, tol, false, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const LatticeState& s = traj[i].state;
      const auto B = vector_polys(s, n_top);
      const auto U = moments_from_J(BandedOperator(s), 3 * n_top + 1, Truncation::finite);
      for (std::size_t n = 0; n <= n_top; ++n) {
        for (std::size_t j = 0; j < n; ++j)
          r = std::max(r, max_abs(apply_U(U, B[n].shifted(j))));
        r = std::max(r, max_abs((apply_U(U, B[n].shifted(n)) - chain_product(s, n)).eval()));
      }
    }
    return r;
  }));
  out.push_back(timed("algebra.chain", d, tol, false, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const LatticeState& s = traj[i].state;
      const auto B = vector_polys(s, n_top);
      const auto U = moments_from_J(BandedOperator(s), 3 * n_top + 1, Truncation::finite);
      for (std::size_t n = 1; n <= n_top; ++n) {
        const Block2 lhs = apply_U(U, B[n].shifted(n));
        const Block2 rhs = block_C(s, n) * apply_U(U, B[n - 1].shifted(n - 1));
        r = std::max(r, max_abs((lhs - rhs).eval()));
      }
    }
    return r;
  }));
  out.push_back(timed("algebra.uniqueness", d, tol, false, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const LatticeState& s = traj[i].state;
      const std::size_t order = std::min(2 * sampling.n_max + 1, s.dimension() - 2);
      const auto direct = moments_from_J(BandedOperator(s), order);
      const auto other = moments_from_orthogonality(s, order);
      for (std::size_t k = 0; k <= order; ++k)
        r = std::max(r, max_abs((direct.moment(k) - other.moment(k)).eval()));
    }
    return r;
  }));
  out.push_back(timed("algebra.reconstruction", d, tol, false, [&] {
    double r = 0.0;
    for (auto i : idx) {
      const LatticeState& s = traj[i].state;
      const std::size_t count = std::min(s.dimension() / 2 - 1, sampling.n_max);
      const auto B = vector_polys(s, count);
      const auto U = moments_from_J(BandedOperator(s), 3 * count + 2, Truncation::finite);
      const auto rec = reconstruct_blocks(
          [&](std::size_t j, std::size_t k) { return apply_U(U, B[k].shifted(j)); },
          block_C0(s), count);
      const auto truth = block_sequences(s);
      for (std::size_t n = 0; n < rec.Cn.size(); ++n)
        r = std::max(r, max_abs((rec.Cn[n] - truth.C(n)).eval()));
      for (std::size_t n = 1; n <= rec.Bn.size(); ++n)
        r = std::max(r, max_abs((rec.Bn[n - 1] - truth.B(n)).eval()));
    }
    return r;
  }));
  return out;
}

namespace {

double convergence_residual(const std::string& id, const Trajectory& traj, double t,
                            const Sampling& sampling) {
  if (id == "order.block_power_law") return max_abs(block_power_residual(traj, 2, t));
  if (id == "order.moment_law") return max_abs(moment_ode_residual(traj, 2, t));
  const Complex z = std::polar(sampling.radius_factor * traj.max_norm_bound().rho, 0.3);
  return max_abs(resolvent_ode_residual(traj, z, t));
}

}  // namespace

std::vector<ConvergenceReport> convergence_study(std::uint64_t seed, std::size_t m, double h,
                                                 double t_end, const Sampling& sampling,
                                                 const GeneratorConfig& gen) {
  const auto coarse = make_bounded_instance(seed, m, h, t_end, gen);
  IntegratorConfig cfg;
  cfg.h = h / 2.0;
  cfg.t_end = t_end;
  const Trajectory fine = integrate(coarse.trajectory.front(), cfg);
  const double t = coarse.trajectory.time((coarse.trajectory.size() - 1) / 2);
  std::vector<ConvergenceReport> out;
  for (const char* id : {"order.block_power_law", "order.moment_law", "order.resolvent_law"}) {
    ConvergenceReport rep{id, seed, h};
    rep.residual_h = convergence_residual(id, coarse.trajectory, t, sampling);
    rep.residual_half = convergence_residual(id, fine, t, sampling);
    rep.ratio = rep.residual_h / rep.residual_half;
    rep.pass = rep.ratio >= 2.5 && rep.ratio <= 6.0;
    out.push_back(rep);
  }
  return out;
}

bool SuiteResult::ok() const {
  for (const auto& c : checks)
    if (!c.expect_fail && !c.pass) return false;
  for (const auto& c : controls)
    if (!c.detected) return false;
  for (const auto& c : convergence)
    if (!c.pass) return false;
  return true;
}

std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t k = 0; k < count; ++k) seeds[k] = k + 1;
  return seeds;
}

namespace {

// Calls job(k) for k = 0..count-1 on up to `threads` workers.  The first
// exception is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        job(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

enum class Group { lax, theorem1, theorem2, corollaries, algebra, stress };

}  // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
  if (cfg.seeds.empty()) throw InvalidArgument("seeds: at least one seed is required");
  IntegratorConfig icfg;
  icfg.h = cfg.h;
  icfg.t_end = cfg.t_end;
  validate(icfg);

  const std::size_t S = cfg.seeds.size();
  std::vector<std::optional<Trajectory>> trajectories(S);
  parallel_for(S, cfg.jobs, [&](std::size_t k) {
    auto inst = make_bounded_instance(cfg.seeds[k], cfg.m, cfg.h, cfg.t_end, cfg.generator);
    if (!cfg.control) {
      trajectories[k].emplace(std::move(inst.trajectory));
      return;
    }
    IntegratorConfig ccfg = icfg;
    ccfg.corruption = *cfg.control;
    ccfg.c_floor = 0.0;
    try {
      trajectories[k].emplace(integrate(inst.trajectory.front(), ccfg));
    } catch (const NonFiniteState&) {
      // the corrupted flow diverged; no trajectory to check
    }
  });

  std::vector<Group> groups;
  if (cfg.control) {
    groups = {Group::lax, Group::theorem1, Group::theorem2, Group::corollaries};
  } else {
    groups = {Group::lax, Group::theorem1, Group::theorem2, Group::corollaries, Group::algebra};
    if (cfg.stress) groups.push_back(Group::stress);
  }

  const bool control = cfg.control.has_value();
  std::vector<std::vector<CheckReport>> slots(S * groups.size());
  parallel_for(slots.size(), cfg.jobs, [&](std::size_t job) {
    const std::size_t k = job / groups.size();
    const Group g = groups[job % groups.size()];
    const std::uint64_t seed = cfg.seeds[k];
    if (g == Group::stress) {
      constexpr std::size_t kStressDimension = 8;
      constexpr double kStressStep = 2.5e-4;
      constexpr double kStressEnd = 2.0;
      const auto inst =
          make_bounded_instance(seed, kStressDimension, cfg.h, kStressEnd, cfg.generator);
      IntegratorConfig scfg;
      scfg.h = kStressStep;
      scfg.t_end = kStressEnd;
      const Trajectory traj = integrate(inst.trajectory.front(), scfg);
      const std::size_t last = traj.size() - 1;
      const std::vector<std::size_t> idx{last / 2, last};
      const auto zs = ring(z_radius(traj, cfg.sampling), cfg.sampling.angles);
      slots[job].push_back(timed("cor1.stress", describe(traj, seed, idx),
                                 thresholds::closed_form_stress, false,
                                 [&] { return closed_form_gap(traj, zs, idx); }));
      return;
    }
    if (!trajectories[k]) {
      slots[job].push_back(make_report("control.diverged", InstanceDescriptor{seed, cfg.m, cfg.h},
                                       std::numeric_limits<double>::infinity(),
                                       thresholds::finite_difference, true));
      return;
    }
    const Trajectory& traj = *trajectories[k];
    switch (g) {
      case Group::lax: slots[job] = check_lax(traj, seed, cfg.sampling, control); break;
      case Group::theorem1: slots[job] = check_theorem1(traj, seed, cfg.sampling, control); break;
      case Group::theorem2: slots[job] = check_theorem2(traj, seed, cfg.sampling, control); break;
      case Group::corollaries:
        slots[job] = check_corollaries(traj, seed, cfg.sampling, control);
        break;
      case Group::algebra: slots[job] = check_algebra(traj, seed, cfg.sampling); break;
      case Group::stress: break;
    }
  });

  SuiteResult result;
  for (auto& slot : slots)
    for (auto& rep : slot) result.checks.push_back(std::move(rep));

  if (control) {
    for (std::size_t k = 0; k < S; ++k) {
      ControlOutcome outcome{*cfg.control, cfg.seeds[k]};
      for (const auto& rep : result.checks)
        if (rep.instance.seed == cfg.seeds[k])
          outcome.max_residual = std::max(outcome.max_residual, rep.max_residual);
      outcome.detected = outcome.max_residual >= thresholds::control_detection;
      result.controls.push_back(outcome);
    }
  } else if (cfg.convergence) {
    result.convergence =
        convergence_study(cfg.seeds.front(), cfg.m, cfg.h, cfg.t_end, cfg.sampling, cfg.generator);
  }
  return result;
}

}  // namespace ktoda
