#include "qlyap/controller.hpp"

#include <cmath>
#include <sstream>

namespace qlyap {

double OddFunction::operator()(double x) const {
  switch (kind) {
    case OddKind::identity:
      return x;
    case OddKind::tanh_scaled:
      // slope 1 at the origin, saturates at +-param
      return param * std::tanh(x / param);
    case OddKind::saturated_linear:
      return std::clamp(x, -param, param);
  }
  return x;
}

OddFunction OddFunction::tanh_scaled(double scale) {
  if (!(scale > 0.0)) {
    throw ValidationError("tanh-scaled shaping needs a positive scale");
  }
  return {OddKind::tanh_scaled, scale};
}

OddFunction OddFunction::saturated_linear(double limit) {
  if (!(limit > 0.0)) {
    throw ValidationError("saturated-linear shaping needs a positive limit");
  }
  return {OddKind::saturated_linear, limit};
}

const char* to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::full:
      return "full";
    case ControlMode::drop_target_term:
      return "drop-target-term";
    case ControlMode::identity_p_half:
      return "identity-p-half";
  }
  return "full";
}

std::optional<ControlMode> control_mode_from_string(std::string_view s) {
  if (s == "full") return ControlMode::full;
  if (s == "drop-target-term") return ControlMode::drop_target_term;
  if (s == "identity-p-half") return ControlMode::identity_p_half;
  return std::nullopt;
}

ControllerConfig::ControllerConfig(HermitianOperator p, QuantumState target,
                                   std::vector<double> gains,
                                   std::vector<OddFunction> odd,
                                   ControlMode mode)
    : p_(std::move(p)),
      target_(std::move(target)),
      gains_(std::move(gains)),
      odd_(std::move(odd)),
      mode_(mode) {
  if (p_.dim() != target_.dim()) {
    throw ValidationError("weight operator and target have different dimensions");
  }
  if (gains_.empty()) {
    throw ValidationError("at least one gain is required");
  }
  for (size_t k = 0; k < gains_.size(); ++k) {
    if (!(gains_[k] > 0.0) || !std::isfinite(gains_[k])) {
      std::ostringstream os;
      os << "gain " << k + 1 << " must be positive and finite, got " << gains_[k];
      throw ValidationError(os.str());
    }
  }
  if (odd_.size() != gains_.size()) {
    throw ValidationError("need exactly one shaping function per gain");
  }
  if (!is_positive_definite(p_, 0.0)) {
    throw ValidationError("weight operator P must be positive definite");
  }
  if (mode_ == ControlMode::identity_p_half) {
    weight_ = 0.5 * Matrix::Identity(p_.dim(), p_.dim());
  } else {
    weight_ = p_.mat();
  }
}

double lyapunov_value(const ControllerConfig& cfg, const QuantumState& psi) {
  if (psi.dim() != cfg.target().dim()) {
    throw ValidationError("state dimension does not match the controller");
  }
  const Vector d = psi.vec() - cfg.target().vec();
  const double v = d.dot(cfg.weight() * d).real();
  // A positive definite quadratic form; tiny negative values are roundoff.
  return v;
}

double equivalence_class_min_value(const ControllerConfig& cfg,
                                   const QuantumState& psi) {
  if (psi.dim() != cfg.target().dim()) {
    throw ValidationError("state dimension does not match the controller");
  }
  const Vector& f = cfg.target().vec();
  const Vector& s = psi.vec();
  const double a = s.dot(cfg.weight() * s).real();
  const double b = f.dot(cfg.weight() * f).real();
  const double cross = std::abs(s.dot(cfg.weight() * f));
  return a + b - 2.0 * cross;
}

namespace {

void check_controller_against_system(const ControllerConfig& cfg,
                                     const ControlledSystem& sys,
                                     const QuantumState& psi) {
  if (psi.dim() != sys.dim() || cfg.target().dim() != sys.dim()) {
    throw ValidationError("state/controller/system dimension mismatch");
  }
  if (cfg.num_controls() != sys.num_controls()) {
    std::ostringstream os;
    os << "controller has " << cfg.num_controls() << " gains but the system has "
       << sys.num_controls() << " controls";
    throw ValidationError(os.str());
  }
}

// x_k = i<psi|[Hk, W]|psi> + 2 Im <psi| Hk W |psif>, optionally truncated.
// The quadratic form of a commutator of Hermitians is purely imaginary:
// <psi|Hk W|psi> = cross, <psi|W Hk|psi> = conj(cross), so the first term
// collapses to i * 2i Im(cross) = -2 Im(cross). No complex matrix product
// is needed.
double feedback_term(const Matrix& hk, const Matrix& w, const Vector& psi,
                     const Vector& target, bool include_target_term) {
  const Complex cross = (hk * psi).dot(w * psi);
  double x = -2.0 * cross.imag();
  if (include_target_term) {
    x += 2.0 * psi.dot(hk * (w * target)).imag();
  }
  return x;
}

}  // namespace

Eigen::VectorXd control_terms(const ControllerConfig& cfg,
                              const ControlledSystem& sys,
                              const QuantumState& psi) {
  check_controller_against_system(cfg, sys, psi);
  const bool with_target = cfg.mode() != ControlMode::drop_target_term;
  Eigen::VectorXd x(sys.num_controls());
  for (int k = 0; k < sys.num_controls(); ++k) {
    x[k] = feedback_term(sys.control(k).mat(), cfg.weight(), psi.vec(),
                         cfg.target().vec(), with_target);
  }
  return x;
}

Eigen::VectorXd control_law(const ControllerConfig& cfg,
                            const ControlledSystem& sys,
                            const QuantumState& psi) {
  const Eigen::VectorXd x = control_terms(cfg, sys, psi);
  Eigen::VectorXd u(x.size());
  for (int k = 0; k < x.size(); ++k) {
    u[k] = -cfg.gains()[k] * cfg.odd()[k](x[k]);
  }
  return u;
}

LyapunovRate lyapunov_derivative(const ControllerConfig& cfg,
                                 const ControlledSystem& sys,
                                 const QuantumState& psi,
                                 const Eigen::VectorXd& u) {
  check_controller_against_system(cfg, sys, psi);
  if (u.size() != sys.num_controls()) {
    throw ValidationError("control vector has wrong length");
  }
  const double inv_hbar = 1.0 / sys.hbar();

  LyapunovRate rate;
  rate.drift = inv_hbar * feedback_term(sys.h0().mat(), cfg.weight(),
                                        psi.vec(), cfg.target().vec(), true);
  for (int k = 0; k < sys.num_controls(); ++k) {
    const double xk = feedback_term(sys.control(k).mat(), cfg.weight(),
                                    psi.vec(), cfg.target().vec(), true);
    rate.control += inv_hbar * u[k] * xk;
  }
  rate.total = rate.drift + rate.control;
  return rate;
}

}  // namespace qlyap
