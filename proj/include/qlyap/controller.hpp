#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlyap/core.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

// Odd shaping functions for the feedback law. All of them satisfy
// x * f(x) >= 0, which is what makes the control part of dV/dt dissipative.
enum class OddKind { identity, tanh_scaled, saturated_linear };

struct OddFunction {
  OddKind kind = OddKind::identity;
  double param = 1.0;  // scale for tanh_scaled, clip limit for saturated_linear

  double operator()(double x) const;

  static OddFunction identity() { return {OddKind::identity, 1.0}; }
  static OddFunction tanh_scaled(double scale);
  static OddFunction saturated_linear(double limit);
};

// full            : distance Lyapunov function with the configured weight P
// drop_target_term: feedback uses only the commutator term (no target term)
// identity_p_half : weight operator replaced by I/2 everywhere
enum class ControlMode { full, drop_target_term, identity_p_half };

const char* to_string(ControlMode mode);
std::optional<ControlMode> control_mode_from_string(std::string_view s);

// Weight operator P, target state, per-control gains and shaping functions.
// The same formulas serve all three modes; identity_p_half swaps the
// effective weight, drop_target_term truncates the feedback signal.
class ControllerConfig {
 public:
  ControllerConfig(HermitianOperator p, QuantumState target,
                   std::vector<double> gains, std::vector<OddFunction> odd,
                   ControlMode mode = ControlMode::full);

  const HermitianOperator& p() const { return p_; }
  const Matrix& weight() const { return weight_; }  // P, or I/2
  const QuantumState& target() const { return target_; }
  const std::vector<double>& gains() const { return gains_; }
  const std::vector<OddFunction>& odd() const { return odd_; }
  ControlMode mode() const { return mode_; }
  int num_controls() const { return static_cast<int>(gains_.size()); }

 private:
  HermitianOperator p_;
  QuantumState target_;
  std::vector<double> gains_;
  std::vector<OddFunction> odd_;
  ControlMode mode_;
  Matrix weight_;
};

// V(psi) = <psi - psif | W | psi - psif>, W the effective weight operator.
double lyapunov_value(const ControllerConfig& cfg, const QuantumState& psi);

// min over a global phase beta of V(psi - e^{i beta} psif). The minimizing
// beta aligns the phase of <psi|W|psif>, so this is available in closed form
// and vanishes exactly when |<psi|psif>| = 1.
double equivalence_class_min_value(const ControllerConfig& cfg,
                                   const QuantumState& psi);

// Feedback signal per control:
//   x_k = i<psi|[Hk, W]|psi> + 2 Im <psi| Hk W |psif>
// (second term omitted in drop_target_term mode). Real by construction.
Eigen::VectorXd control_terms(const ControllerConfig& cfg,
                              const ControlledSystem& sys,
                              const QuantumState& psi);

// u_k = -K_k f_k(x_k).
Eigen::VectorXd control_law(const ControllerConfig& cfg,
                            const ControlledSystem& sys,
                            const QuantumState& psi);

// dV/dt along the dynamics with control u, split into the drift part and the
// part proportional to u. The control part is (1/hbar) sum_k u_k x_k with the
// untruncated x_k, so drift + control == total in every mode.
struct LyapunovRate {
  double total = 0.0;
  double drift = 0.0;
  double control = 0.0;
};

LyapunovRate lyapunov_derivative(const ControllerConfig& cfg,
                                 const ControlledSystem& sys,
                                 const QuantumState& psi,
                                 const Eigen::VectorXd& u);

}  // namespace qlyap
