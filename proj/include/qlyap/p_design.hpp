#pragma once

#include <cstdint>
#include <variant>

#include "qlyap/core.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

// Ways to obtain the weight operator P from a config.
struct CommutingPSpec {
  Eigen::VectorXd eigenvalues;  // one per ascending H0 eigenvalue
};
struct SpectralPSpec {
  Matrix vectors;  // desired eigenvectors as columns, possibly raw
  Eigen::VectorXd eigenvalues;
};
struct ExplicitPSpec {
  Matrix matrix;
};
struct RandomPSpec {
  std::uint64_t seed = 1;
  double min_offdiag = 0.1;
  double min_eigenvalue = 0.1;
};
using PSpec = std::variant<CommutingPSpec, SpectralPSpec, ExplicitPSpec, RandomPSpec>;

// P = sum_i p_i |lambda_i><lambda_i| over the ascending eigenbasis of H0.
// Commutes with H0 by construction. Requires a nondegenerate H0 and
// positive p_i.
HermitianOperator build_commuting_p(const ControlledSystem& sys,
                                    const Eigen::VectorXd& eigenvalues);

// Orthonormalizes the given vectors sequentially (Gram-Schmidt in input
// order) and synthesizes P = sum_i p_i |q_i><q_i|. The basis actually used
// is returned so callers can audit how far it moved from the input.
struct SpectralSynthesis {
  HermitianOperator p;
  Matrix orthonormal_basis;
};

SpectralSynthesis build_spectral_p(const Matrix& vectors,
                                   const Eigen::VectorXd& eigenvalues);

// Magnitude of the smallest off-diagonal element of P expressed in the
// ascending eigenbasis of H0. All of them must be nonzero for the sampling
// oracle's sufficient condition, so the verdict is min > tol. A negative tol
// requests the default threshold of 1e-6 relative to max |P_ij|.
struct OffdiagonalCheck {
  bool ok = false;
  double min_offdiagonal = 0.0;
  double threshold = 0.0;
  int row = -1;
  int col = -1;
};

OffdiagonalCheck check_offdiagonal_condition(const HermitianOperator& p,
                                             const ControlledSystem& sys,
                                             double tol = -1.0);

// Seed-deterministic random P in the H0 eigenbasis with every off-diagonal
// magnitude above min_offdiag, diagonal shifted until the smallest eigenvalue
// clears min_eigenvalue. Throws after 100 failed attempts.
HermitianOperator generate_random_p(const ControlledSystem& sys,
                                    std::uint64_t seed, double min_offdiag,
                                    double min_eigenvalue);

// Dispatch over the PSpec variant.
HermitianOperator build_p(const ControlledSystem& sys, const PSpec& spec);

}  // namespace qlyap
