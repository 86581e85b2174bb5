#pragma once

// The four-banded full Kostant-Toda flow, in coefficient form and in Lax
// form, and a fixed-step RK4 integrator carrying the quadrature states used
// by the closed-form resolvent.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ktoda/core_types.hpp"

namespace ktoda {

/// Time derivative of a LatticeState, same shapes as a, b, c.
struct LatticeRates {
  std::vector<Complex> a;
  std::vector<Complex> b;
  std::vector<Complex> c;
};

/// Deliberately wrong flows used as negative controls.
enum class Distortion {
  none,
  /// b' <- (1 - magnitude) b'
  freeze_b,
  /// c' <- (1 + magnitude) c'
  scale_c_rhs,
  /// the [diag(a), J_-] part of the commutator is scaled by (1 - magnitude)
  drop_commutator_term,
};

struct CorruptionSpec {
  Distortion kind = Distortion::none;
  double magnitude = 1.0;
};

std::string_view to_string(Distortion kind);
std::optional<Distortion> parse_distortion(std::string_view name);

/// a_n' = b_n - b_{n-1}
/// b_n' = b_n (a_{n+1} - a_n) + c_n - c_{n-1}
/// c_n' = c_n (a_{n+2} - a_n)
/// with b_0 = c_0 = 0 and b_m = c_{m-1} = 0.
LatticeRates kostant_rhs(const LatticeState& s, const CorruptionSpec& corruption = {});

/// [J, J_-] of the finite truncation.
DenseMatrix lax_rhs(const BandedOperator& J);

struct AugmentedState {
  LatticeState state;
  Complex q1{};  ///< integral of a_1
  Complex q2{};  ///< integral of a_2
  Complex q3{};  ///< integral of exp(q2 - q1)

  static AugmentedState at_rest(LatticeState s) { return AugmentedState{std::move(s)}; }
  double time() const noexcept { return state.time(); }
};

struct IntegratorConfig {
  double h = 1e-3;
  double t_end = 1.0;
  /// |c_n| below this aborts with CNearZero; 0 disables the check.
  double c_floor = 1e-12;
  CorruptionSpec corruption{};
};

/// Throws InvalidArgument naming the offending field.
void validate(const IntegratorConfig& cfg);

/// Number of RK4 steps for cfg (t_end must be an integer multiple of h).
std::size_t step_count(const IntegratorConfig& cfg);

/// RK4 samples on the uniform grid t_i = t_0 + i h.
class Trajectory {
 public:
  Trajectory(double h, CorruptionSpec flow, std::vector<AugmentedState> samples);

  double step() const noexcept { return h_; }
  const CorruptionSpec& flow() const noexcept { return flow_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const AugmentedState& operator[](std::size_t i) const { return samples_.at(i); }
  const AugmentedState& front() const { return samples_.front(); }
  const AugmentedState& back() const { return samples_.back(); }
  std::span<const AugmentedState> samples() const noexcept { return samples_; }

  double time(std::size_t i) const;
  /// Grid index of t; GridError if t is off the grid or outside it.
  std::size_t index_of(double t) const;
  /// Grid index of t with both neighbours present (central differences).
  std::size_t interior_index(double t) const;

  /// Max norm bound of J over all samples.
  NormBound max_norm_bound() const;

 private:
  double h_;
  CorruptionSpec flow_;
  std::vector<AugmentedState> samples_;
};

Trajectory integrate(const AugmentedState& s0, const IntegratorConfig& cfg);

/// Central difference (f(t_{i+1}) - f(t_{i-1})) / (2h) at interior index i.
template <class F>
auto central_difference(const Trajectory& traj, std::size_t i, F&& f) {
  if (i == 0 || i + 1 >= traj.size()) throw GridError("central_difference: index not interior");
  return ((f(traj[i + 1]) - f(traj[i - 1])) / (2.0 * traj.step())).eval();
}

/// d/dt (J^n)_11 by central differences minus
/// (J^{n+1})_11 - (J^n)_11 B_1 + [(J^n)_11, (J_-)_11].
Block2 block_power_residual(const Trajectory& traj, std::size_t n, double t);

namespace detail {

/// Flattened RK4 state: a (m), b (m-1), c (m-2), q1, q2, q3.
ComplexVector pack(const AugmentedState& s);
AugmentedState unpack(const ComplexVector& y, std::size_t m, double t);
/// Derivative of the packed augmented state (first 3m entries of y).
void augmented_rhs(const ComplexVector& y, std::size_t m, const CorruptionSpec& corruption,
                   ComplexVector& dy);

template <class F>
ComplexVector rk4_step(const ComplexVector& y, double h, F&& f) {
  const ComplexVector k1 = f(y);
  const ComplexVector k2 = f((y + 0.5 * h * k1).eval());
  const ComplexVector k3 = f((y + 0.5 * h * k2).eval());
  const ComplexVector k4 = f((y + h * k3).eval());
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

}  // namespace ktoda
