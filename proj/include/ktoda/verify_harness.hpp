#pragma once

// Random bounded instances and the verification suite: every residual check
// reduced to a CheckReport (max residual against a threshold), plus negative
// controls on deliberately wrong flows and a step-halving order study.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"

namespace ktoda {

struct GeneratorConfig {
  double radius = 0.5;    ///< a, b, c drawn uniformly from the disk of this radius
  double c_min = 0.1;     ///< redraw c entries with |c| below this
  double bound = 1.5;     ///< accept only if every |entry| <= bound on [0, t_end]
  std::size_t max_draws = 1000;
};

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng);
/// Uniform in the disk |w| <= radius, by rejection from the square.
Complex disk_uniform(std::mt19937_64& rng, double radius);

LatticeState random_state(std::mt19937_64& rng, std::size_t m, const GeneratorConfig& gen);

/// a == alpha, b == c == 0: a fixed point of the flow.
LatticeState fixed_point_state(std::size_t m, Complex alpha);

struct BoundedInstance {
  std::uint64_t seed = 0;
  std::size_t draws = 0;  ///< states drawn until one passed the screen
  Trajectory trajectory;
};

/// Draws states from a seeded mt19937_64 until the true flow keeps every
/// entry within gen.bound on [0, t_end].  Throws NonFiniteState after
/// gen.max_draws rejections.
BoundedInstance make_bounded_instance(std::uint64_t seed, std::size_t m, double h,
                                      double t_end, const GeneratorConfig& gen = {});

struct InstanceDescriptor {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  double h = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct CheckReport {
  std::string id;
  InstanceDescriptor instance;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;         ///< max_residual <= threshold
  bool expect_fail = false;  ///< run on a corrupted flow
  double runtime_seconds = 0.0;
};

CheckReport make_report(std::string id, const InstanceDescriptor& instance,
                        double max_residual, double threshold, bool expect_fail = false,
                        double runtime_seconds = 0.0);

namespace thresholds {
inline constexpr double finite_difference = 1e-5;
inline constexpr double algebraic = 1e-10;
/// Identities that hold up to a few roundings of O(1) quantities.
inline constexpr double roundoff = 1e-15;
inline constexpr double rhs_equivalence = 1e-14;
inline constexpr double isospectral = 1e-6;
inline constexpr double laurent = 1e-8;
inline constexpr double closed_form = 1e-4;
inline constexpr double closed_form_stress = 1e-3;
inline constexpr double exponential = 1e-5;
inline constexpr double exponential_tail = 1e-12;
/// A control counts as detected when some residual reaches this.
inline constexpr double control_detection = 1e-2;
}  // namespace thresholds

/// Where residuals are sampled.
struct Sampling {
  std::size_t n_max = 4;           ///< orders of block powers, moments, B_n
  std::size_t t_samples = 9;       ///< interior times spread over [0.1, 0.9] t_end
  std::size_t angles = 16;         ///< ring of z values
  double radius_factor = 2.0;      ///< |z| = radius_factor * max rho along the trajectory
  double z0_radius = 0.5;          ///< evaluation points of polynomial identities
  std::size_t z0_angles = 4;
};

/// Grid indices of the sampled times.
std::vector<std::size_t> sample_indices(const Trajectory& traj, std::size_t count);
/// radius * exp(2 pi i (k + offset) / count), k = 0..count-1.
std::vector<Complex> ring(double radius, std::size_t count, double offset = 0.0);

InstanceDescriptor describe(const Trajectory& traj, std::uint64_t seed,
                            const std::vector<std::size_t>& indices);

// Individual checks.  expect_fail marks reports computed on corrupted flows.
std::vector<CheckReport> check_theorem1(const Trajectory& traj, std::uint64_t seed,
                                        const Sampling& sampling, bool expect_fail = false);
std::vector<CheckReport> check_theorem2(const Trajectory& traj, std::uint64_t seed,
                                        const Sampling& sampling, bool expect_fail = false);
std::vector<CheckReport> check_corollaries(const Trajectory& traj, std::uint64_t seed,
                                           const Sampling& sampling, bool expect_fail = false);
/// Lax form against the coefficient form, and spectrum conservation.
std::vector<CheckReport> check_lax(const Trajectory& traj, std::uint64_t seed,
                                   const Sampling& sampling, bool expect_fail = false);
/// Orthogonality, chain identity, uniqueness and block reconstruction at the
/// sampled times (flow independent).  Reconstruction recovers C_0..C_k and
/// B_1..B_{k+1} with k = min(m/2 - 1, n_max).
std::vector<CheckReport> check_algebra(const Trajectory& traj, std::uint64_t seed,
                                       const Sampling& sampling);

/// Largest relative eigenvalue deviation max_k |lambda_k(t) - lambda_k(0)|
/// / max |lambda(0)| over the sampled times, eigenvalues paired greedily.
double spectral_drift(const Trajectory& traj, const std::vector<std::size_t>& indices);

struct ConvergenceReport {
  std::string id;
  std::uint64_t seed = 0;
  double h = 0.0;
  double residual_h = 0.0;
  double residual_half = 0.0;
  double ratio = 0.0;
  bool pass = false;  ///< ratio in [2.5, 6]
};

/// Residual of the block-power and resolvent laws at t = t_end / 2 for step
/// h and h / 2.
std::vector<ConvergenceReport> convergence_study(std::uint64_t seed, std::size_t m, double h,
                                                 double t_end, const Sampling& sampling,
                                                 const GeneratorConfig& gen = {});

struct ControlOutcome {
  CorruptionSpec corruption;
  std::uint64_t seed = 0;
  double max_residual = 0.0;
  bool detected = false;  ///< max_residual >= control_detection
};

struct SuiteConfig {
  std::vector<std::uint64_t> seeds;
  std::size_t m = 16;
  double h = 1e-3;
  double t_end = 1.0;
  Sampling sampling;
  GeneratorConfig generator;
  std::optional<CorruptionSpec> control;  ///< flip to a negative-control run
  bool stress = true;       ///< closed form at t = 2 with h = 2.5e-4 on m = 8 instances
  bool convergence = true;  ///< step-halving order study on the first seed
  std::size_t jobs = 1;
};

struct SuiteResult {
  std::vector<CheckReport> checks;
  std::vector<ControlOutcome> controls;
  std::vector<ConvergenceReport> convergence;

  /// Every non-control check passes, every control is detected and every
  /// order study lands in range.
  bool ok() const;
};

/// Runs every check for every seed on up to cfg.jobs threads.  Report order
/// depends only on cfg.
SuiteResult run_suite(const SuiteConfig& cfg);

std::vector<std::uint64_t> default_seeds(std::size_t count);

}  // namespace ktoda
