#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qlyap/controller.hpp"
#include "qlyap/core.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

struct SimulationConfig {
  double dt = 1e-2;
  double t_final = 0.0;
  int record_stride = 1;     // keep every n-th step; the final state is always kept
  bool renormalize = true;   // divide out accumulated norm drift each step
};

// Closed-loop recording. All series have equal length and strictly
// increasing times. max_control_rate and max_norm_drift are tracked over
// every step, not just the recorded ones.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Eigen::VectorXd> controls;
  std::vector<double> lyapunov;
  std::vector<double> fidelity;
  std::vector<double> rate_control_part;

  double max_control_rate = -std::numeric_limits<double>::infinity();
  double max_abs_control = 0.0;
  double max_norm_drift = 0.0;
  bool aborted = false;
  std::string abort_reason;

  std::size_t size() const { return times.size(); }
};

// One zero-order-hold step: psi' = exp(-i H(u) dt / hbar) psi, evaluated
// through the eigendecomposition of H(u) so the step is exactly unitary.
QuantumState propagate_step(const ControlledSystem& sys,
                            const QuantumState& psi, const Eigen::VectorXd& u,
                            double dt);

// Closed-loop simulation: the control is evaluated at the start of each step
// and held. Aborts (with the last valid record kept) if anything goes
// non-finite. With enforce_assumptions set, refuses to run a system that
// fails the structural checks.
Trajectory simulate(const ControlledSystem& sys, const ControllerConfig& cfg,
                    const SimulationConfig& sim, const QuantumState& psi0,
                    bool enforce_assumptions = true);

// Reruns at half the step size and reports the largest state difference at
// coinciding record times. This bounds the zero-order-hold error.
struct StepDoublingResult {
  double max_state_diff = 0.0;
  double time_of_max = 0.0;
};

StepDoublingResult step_doubling_check(const ControlledSystem& sys,
                                       const ControllerConfig& cfg,
                                       const SimulationConfig& sim,
                                       const QuantumState& psi0);

}  // namespace qlyap
