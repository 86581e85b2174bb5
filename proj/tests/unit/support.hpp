#pragma once

// Shared fixtures and brute-force oracles for the unit tests.  The oracles
// use dense Eigen arithmetic only and never call the routines they check.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ktoda/core_types.hpp"
#include "ktoda/lax_dynamics.hpp"
#include "ktoda/verify_harness.hpp"

namespace ktoda::testing {

inline LatticeState constant_state(std::size_t m, Complex a, Complex b, Complex c) {
  return LatticeState(std::vector<Complex>(m, a), std::vector<Complex>(m - 1, b),
                      std::vector<Complex>(m - 2, c));
}

/// Random complex state with entries in the disk of the given radius.
inline LatticeState random_complex_state(std::uint64_t seed, std::size_t m, double radius = 1.0) {
  std::mt19937_64 rng(seed);
  GeneratorConfig gen;
  gen.radius = radius;
  gen.c_min = 0.1 * radius;
  return random_state(rng, m, gen);
}

/// (J^k) by repeated dense multiplication.
inline DenseMatrix dense_power(const DenseMatrix& J, std::size_t k) {
  DenseMatrix P = DenseMatrix::Identity(J.rows(), J.cols());
  for (std::size_t i = 0; i < k; ++i) P = P * J;
  return P;
}

inline double block_gap(const Block2& A, const Block2& B) { return (A - B).cwiseAbs().maxCoeff(); }

inline Trajectory bounded_trajectory(std::uint64_t seed, std::size_t m, double h = 1e-3,
                                     double t_end = 1.0) {
  return make_bounded_instance(seed, m, h, t_end).trajectory;
}

}  // namespace ktoda::testing
