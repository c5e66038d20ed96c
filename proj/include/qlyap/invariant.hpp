#pragma once

#include <optional>
#include <vector>

#include "qlyap/controller.hpp"
#include "qlyap/core.hpp"
#include "qlyap/simulate.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

// Whether the weight operator commutes with the drift. The two cases have
// different invariant-set structure and different diagnostics below.
enum class CaseKind { commuting, noncommuting };

struct CaseClassification {
  CaseKind kind = CaseKind::noncommuting;
  double commutator_norm = 0.0;  // max |[H0, W]_ij|
  double tol = 0.0;
};

CaseClassification classify_case(const HermitianOperator& p,
                                 const ControlledSystem& sys,
                                 double tol = 1e-10);

// Residuals of the commuting-case invariant-set equations at a state:
// per-control |<psi|[Hk,W]|psi>| and |Im <psi|Hk|psif>|, plus
// |Im <psi|psif>|. The angle-alignment conditions come in two branches
// depending on whether <psi|psif> vanishes; both are reported when they are
// defined, with residuals wrapped into (-pi, pi].
struct Case1Residuals {
  Eigen::VectorXd commutator_terms;
  Eigen::VectorXd target_imag_terms;
  double overlap_imag = 0.0;
  double overlap_magnitude = 0.0;
  bool zero_overlap_branch = false;
  // max_k |angle(<psi|Hk|psif>) - angle(<psi|psif>)|, needs nonzero overlap
  std::optional<double> aligned_with_overlap;
  // max_{k<j} |angle(<psi|Hk|psif>) - angle(<psi|Hj|psif>)|, needs >= 2
  // well-defined angles
  std::optional<double> pairwise_aligned;
};

Case1Residuals case1_residuals(const QuantumState& psi,
                               const ControllerConfig& cfg,
                               const ControlledSystem& sys, double tol = 1e-9);

// Commuting-case restriction: every cross term c_m* c_j <m|Hk|j> over the
// drift eigenbasis must vanish, otherwise the invariant set is larger than
// the equivalence class of the target.
struct StructuralViolation {
  int control = 0;
  int m = 0;
  int j = 0;
  double magnitude = 0.0;
};

struct StructuralCheck {
  bool ok = true;
  double max_magnitude = 0.0;
  std::vector<StructuralViolation> violations;
};

StructuralCheck case1_structural_condition(const ControllerConfig& cfg,
                                           const ControlledSystem& sys,
                                           const QuantumState& psi,
                                           double tol = 1e-9);

// Residuals of the noncommuting-case invariant-set equations at a state.
struct Case2Residuals {
  double drift_commutator = 0.0;           // |<psi|[H0,W]|psi>|
  Eigen::VectorXd control_commutators;     // |<psi|[Hk,W]|psi>|
  double drift_target_imag = 0.0;          // |Im <psi|H0 W|psif>|
  Eigen::VectorXd control_target_imag;     // |Im <psi|Hk W|psif>|
};

Case2Residuals case2_residuals(const QuantumState& psi,
                               const ControllerConfig& cfg,
                               const ControlledSystem& sys);

// Propagates psi under the drift alone across one period of the slowest
// transition and samples |<psi(t)|[H0,W]|psi(t)>|. When every off-diagonal
// of W in the drift eigenbasis is nonzero, this stays bounded away from zero
// for any genuine superposition and vanishes only on eigenstates.
struct DriftSamplingResult {
  double max_residual = 0.0;
  double time_of_max = 0.0;
  double period = 0.0;
  int samples = 0;
};

DriftSamplingResult drift_sampling_oracle(const ControllerConfig& cfg,
                                          const ControlledSystem& sys,
                                          const QuantumState& psi,
                                          int samples = 256);

// Where a trajectory ended up, expressed over the drift eigenbasis.
struct LimitClassification {
  Eigen::VectorXd overlaps;  // |<lambda_m|psi(T)>|^2, ascending eigenvalues
  int dominant_index = 0;    // 0-based
  double target_fidelity = 0.0;
};

LimitClassification classify_limit(const Trajectory& traj,
                                   const ControlledSystem& sys,
                                   const QuantumState& target);

}  // namespace qlyap
