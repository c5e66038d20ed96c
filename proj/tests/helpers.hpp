#pragma once

// Shared fixtures for the test binaries: the bundled five-level system, its
// explicit weight operator, and deterministic random data. Random draws go
// through uniform01 so every platform sees identical streams.

#include <cmath>
#include <random>
#include <vector>

#include "qlyap/controller.hpp"
#include "qlyap/core.hpp"
#include "qlyap/system.hpp"

namespace testutil {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline qlyap::Matrix five_level_h0() {
  qlyap::Matrix h0 = qlyap::Matrix::Zero(5, 5);
  h0(0, 0) = 1.0;
  h0(1, 1) = 1.2;
  h0(2, 2) = 1.3;
  h0(3, 3) = 2.0;
  h0(4, 4) = 2.15;
  return h0;
}

inline qlyap::Matrix five_level_h1() {
  qlyap::Matrix h1 = qlyap::Matrix::Zero(5, 5);
  for (int i = 0; i < 3; ++i) {
    for (int j = 3; j < 5; ++j) {
      h1(i, j) = 1.0;
      h1(j, i) = 1.0;
    }
  }
  return h1;
}

inline qlyap::Matrix five_level_p() {
  qlyap::Matrix p(5, 5);
  p << 5.2, 0.8, 2.8, -0.8, 0.3,
       0.8, 5.2, -0.8, 2.8, -0.3,
       2.8, -0.8, 5.2, 0.8, -0.3,
       -0.8, 2.8, 0.8, 5.2, 0.3,
       0.3, -0.3, -0.3, 0.3, 1.7;
  return p;
}

inline qlyap::ControlledSystem five_level_system() {
  return qlyap::ControlledSystem(
      qlyap::HermitianOperator(five_level_h0()),
      {qlyap::HermitianOperator(five_level_h1())});
}

inline qlyap::Vector basis_state(int i, int n) {
  qlyap::Vector v = qlyap::Vector::Zero(n);
  v(i) = 1.0;
  return v;
}

inline qlyap::ControllerConfig five_level_controller(
    double gain = 0.05, qlyap::ControlMode mode = qlyap::ControlMode::full) {
  return qlyap::ControllerConfig(
      qlyap::HermitianOperator(five_level_p()),
      qlyap::QuantumState(basis_state(4, 5)), {gain},
      {qlyap::OddFunction::identity()}, mode);
}

inline qlyap::Vector random_unit_state(int n, std::mt19937_64& rng) {
  qlyap::Vector v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = qlyap::Complex(2.0 * uniform01(rng) - 1.0,
                          2.0 * uniform01(rng) - 1.0);
  }
  return v / v.norm();
}

inline qlyap::Matrix random_hermitian(int n, std::mt19937_64& rng) {
  qlyap::Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = qlyap::Complex(2.0 * uniform01(rng) - 1.0,
                               2.0 * uniform01(rng) - 1.0);
    }
  }
  return 0.5 * (a + a.adjoint());
}

// Random diagonal drift with all gaps distinct (entries spread out), handy
// for commuting-case constructions.
inline qlyap::Matrix random_nondegenerate_diag(int n, std::mt19937_64& rng) {
  qlyap::Matrix h0 = qlyap::Matrix::Zero(n, n);
  double level = uniform01(rng);
  for (int i = 0; i < n; ++i) {
    h0(i, i) = level;
    level += 0.5 + uniform01(rng);
  }
  return h0;
}

}  // namespace testutil
