#pragma once

#include <array>
#include <vector>

#include "qlyap/core.hpp"

namespace qlyap {

// Drift Hamiltonian plus one or more control Hamiltonians, all N x N.
// Dynamics: i hbar d/dt psi = (H0 + sum_k u_k Hk) psi.
class ControlledSystem {
 public:
  ControlledSystem(HermitianOperator h0, std::vector<HermitianOperator> controls,
                   double hbar = 1.0);

  const HermitianOperator& h0() const { return h0_; }
  const std::vector<HermitianOperator>& controls() const { return controls_; }
  const HermitianOperator& control(int k) const { return controls_.at(k); }
  double hbar() const { return hbar_; }
  Eigen::Index dim() const { return h0_.dim(); }
  int num_controls() const { return static_cast<int>(controls_.size()); }

 private:
  HermitianOperator h0_;
  std::vector<HermitianOperator> controls_;
  double hbar_;
};

// Spectral gap structure of H0. ok requires every eigenvalue gap to be
// nonzero and all gaps over unordered index pairs to be mutually distinct,
// so that no two transitions share a frequency.
struct GapCheck {
  bool ok = false;
  double min_eigenvalue_gap = 0.0;  // min_{i<j} (lambda_j - lambda_i)
  double min_gap_separation = 0.0;  // min over distinct pairs of |g_ab - g_cd|
  std::vector<std::array<int, 2>> degenerate_pairs;
  std::vector<std::array<int, 4>> colliding_gap_pairs;  // (a,b) vs (c,d)
};

GapCheck check_lambda_nondegenerate(const ControlledSystem& sys,
                                    double tol = 1e-9);

// Rank of the Lie algebra generated by {i H0, i Hk} inside su(N), after
// projecting out the trace direction (a global phase is not controllable
// and not needed). ok iff rank == N^2 - 1.
struct LieRankCheck {
  bool ok = false;
  int rank = 0;
  int required = 0;
  bool budget_exhausted = false;
};

LieRankCheck check_controllability(const ControlledSystem& sys,
                                   double tol = 1e-8);

// The target must be an eigenvector of H0 (small residual) and must not be
// an eigenvector of any control Hamiltonian (large residual), otherwise the
// feedback terms vanish identically at the target.
struct TargetCheck {
  bool ok = false;
  bool h0_eigenstate = false;
  double h0_residual = 0.0;
  double lambda_f = 0.0;  // <psif|H0|psif>
  std::vector<double> control_residuals;
  std::vector<int> control_eigenstate_of;  // controls the target is an eigenvector of
};

TargetCheck check_target_assumptions(const ControlledSystem& sys,
                                     const QuantumState& target,
                                     double tol = 1e-8);

// With several controls, no vector may be a simultaneous eigenvector of all
// of them. Vacuous for a single control. Eigenvectors inside nearly
// degenerate eigenspaces of the first control are flagged for manual review
// since the eigenbasis there is not unique.
struct CommonEigenvectorCheck {
  bool ok = true;
  bool vacuous = false;
  bool degenerate_flag = false;
  double worst_margin = 0.0;
  int offending_index = -1;
};

CommonEigenvectorCheck check_no_common_eigenvector(const ControlledSystem& sys,
                                                   double tol = 1e-8);

struct AssumptionReport {
  GapCheck gaps;
  LieRankCheck lie;
  TargetCheck target;
  CommonEigenvectorCheck common;

  bool all_ok() const {
    return gaps.ok && lie.ok && target.ok && common.ok;
  }
};

AssumptionReport check_all_assumptions(const ControlledSystem& sys,
                                       const QuantumState& target);

// H0 + sum_k u_k Hk.
HermitianOperator hamiltonian_at(const ControlledSystem& sys,
                                 const Eigen::VectorXd& u);

}  // namespace qlyap
