#include "qlyap/invariant.hpp"

#include <cmath>

namespace qlyap {

CaseClassification classify_case(const HermitianOperator& p,
                                 const ControlledSystem& sys, double tol) {
  if (p.dim() != sys.dim()) {
    throw ValidationError("weight operator dimension does not match the system");
  }
  CaseClassification out;
  out.tol = tol;
  out.commutator_norm =
      commutator(sys.h0().mat(), p.mat()).cwiseAbs().maxCoeff();
  out.kind = out.commutator_norm <= tol ? CaseKind::commuting
                                        : CaseKind::noncommuting;
  return out;
}

namespace {

double wrap_angle(double a) {
  // into (-pi, pi]
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) {
    w += 2.0 * M_PI;
  }
  return w;
}

}  // namespace

Case1Residuals case1_residuals(const QuantumState& psi,
                               const ControllerConfig& cfg,
                               const ControlledSystem& sys, double tol) {
  const CaseClassification cls =
      classify_case(HermitianOperator(cfg.weight()), sys);
  if (cls.kind != CaseKind::commuting) {
    throw ValidationError(
        "commuting-case residuals requested but [H0, P] != 0; "
        "use the noncommuting diagnostics instead");
  }
  const Vector& s = psi.vec();
  const Vector& f = cfg.target().vec();
  const int r = sys.num_controls();

  Case1Residuals out;
  out.commutator_terms.resize(r);
  out.target_imag_terms.resize(r);

  std::vector<Complex> overlaps(r);
  for (int k = 0; k < r; ++k) {
    const Matrix& hk = sys.control(k).mat();
    out.commutator_terms[k] = std::abs((hk * s).dot(cfg.weight() * s).imag()) * 2.0;
    const Complex ov = s.dot(hk * f);
    overlaps[k] = ov;
    out.target_imag_terms[k] = std::abs(ov.imag());
  }

  const Complex total = s.dot(f);
  out.overlap_imag = std::abs(total.imag());
  out.overlap_magnitude = std::abs(total);
  out.zero_overlap_branch = out.overlap_magnitude <= tol;

  // Angles are meaningless for vanishing overlaps; collect the usable ones.
  std::vector<double> angles;
  angles.reserve(r);
  for (int k = 0; k < r; ++k) {
    if (std::abs(overlaps[k]) > tol) {
      angles.push_back(std::arg(overlaps[k]));
    }
  }
  if (!out.zero_overlap_branch && !angles.empty()) {
    const double ref = std::arg(total);
    double worst = 0.0;
    for (double a : angles) {
      worst = std::max(worst, std::abs(wrap_angle(a - ref)));
    }
    out.aligned_with_overlap = worst;
  }
  if (angles.size() >= 2) {
    double worst = 0.0;
    for (size_t a = 0; a < angles.size(); ++a) {
      for (size_t b = a + 1; b < angles.size(); ++b) {
        worst = std::max(worst, std::abs(wrap_angle(angles[a] - angles[b])));
      }
    }
    out.pairwise_aligned = worst;
  }
  return out;
}

StructuralCheck case1_structural_condition(const ControllerConfig& cfg,
                                           const ControlledSystem& sys,
                                           const QuantumState& psi,
                                           double tol) {
  const Spectrum spec = eigendecompose(sys.h0());
  const Vector c = spec.eigenvectors.adjoint() * psi.vec();
  const Eigen::Index n = sys.dim();

  StructuralCheck out;
  for (int k = 0; k < sys.num_controls(); ++k) {
    const Matrix hk_basis = spec.eigenvectors.adjoint() *
                            sys.control(k).mat() * spec.eigenvectors;
    for (Eigen::Index m = 0; m < n; ++m) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (m == j) {
          continue;
        }
        const double mag =
            std::abs(c[m]) * std::abs(c[j]) * std::abs(hk_basis(m, j));
        if (mag > out.max_magnitude) {
          out.max_magnitude = mag;
        }
        if (mag > tol) {
          out.violations.push_back({k, static_cast<int>(m),
                                    static_cast<int>(j), mag});
        }
      }
    }
  }
  out.ok = out.violations.empty();
  return out;
}

Case2Residuals case2_residuals(const QuantumState& psi,
                               const ControllerConfig& cfg,
                               const ControlledSystem& sys) {
  const Vector& s = psi.vec();
  const Vector& f = cfg.target().vec();
  const int r = sys.num_controls();

  Case2Residuals out;
  out.control_commutators.resize(r);
  out.control_target_imag.resize(r);

  out.drift_commutator =
      2.0 * std::abs((sys.h0().mat() * s).dot(cfg.weight() * s).imag());
  out.drift_target_imag =
      std::abs(s.dot(sys.h0().mat() * (cfg.weight() * f)).imag());
  for (int k = 0; k < r; ++k) {
    const Matrix& hk = sys.control(k).mat();
    out.control_commutators[k] =
        2.0 * std::abs((hk * s).dot(cfg.weight() * s).imag());
    out.control_target_imag[k] =
        std::abs(s.dot(hk * (cfg.weight() * f)).imag());
  }
  return out;
}

DriftSamplingResult drift_sampling_oracle(const ControllerConfig& cfg,
                                          const ControlledSystem& sys,
                                          const QuantumState& psi,
                                          int samples) {
  if (samples < 2) {
    throw ValidationError("sampling oracle needs at least 2 samples");
  }
  const Spectrum spec = eigendecompose(sys.h0());
  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    for (Eigen::Index j = i + 1; j < spec.eigenvalues.size(); ++j) {
      const double g = spec.eigenvalues[j] - spec.eigenvalues[i];
      if (g > 0.0) {
        min_gap = std::min(min_gap, g);
      }
    }
  }
  if (!std::isfinite(min_gap) || min_gap <= 0.0) {
    throw ValidationError(
        "drift spectrum is fully degenerate; no sampling period exists");
  }

  DriftSamplingResult out;
  out.samples = samples;
  out.period = 2.0 * M_PI * sys.hbar() / min_gap;

  // Drift evolution in the eigenbasis is a pure phase per coefficient.
  const Vector c0 = spec.eigenvectors.adjoint() * psi.vec();
  const Matrix w_basis = spec.eigenvectors.adjoint() * cfg.weight() *
                         spec.eigenvectors;
  const Matrix h0_basis = spec.eigenvalues.cast<Complex>().asDiagonal();

  for (int s = 0; s < samples; ++s) {
    const double t = out.period * static_cast<double>(s) /
                     static_cast<double>(samples);
    Vector c(c0.size());
    for (Eigen::Index m = 0; m < c0.size(); ++m) {
      c[m] = c0[m] * std::polar(1.0, -spec.eigenvalues[m] * t / sys.hbar());
    }
    // <psi|[H0,W]|psi> with H0 diagonal here
    const Complex val = (h0_basis * c).dot(w_basis * c) -
                        (w_basis * c).dot(h0_basis * c);
    const double residual = std::abs(val);
    if (residual > out.max_residual) {
      out.max_residual = residual;
      out.time_of_max = t;
    }
  }
  return out;
}

LimitClassification classify_limit(const Trajectory& traj,
                                   const ControlledSystem& sys,
                                   const QuantumState& target) {
  if (traj.states.empty()) {
    throw ValidationError("cannot classify an empty trajectory");
  }
  const Spectrum spec = eigendecompose(sys.h0());
  const Vector& final_state = traj.states.back();

  LimitClassification out;
  out.overlaps.resize(spec.eigenvalues.size());
  for (Eigen::Index m = 0; m < spec.eigenvalues.size(); ++m) {
    const Complex amp = spec.eigenvectors.col(m).dot(final_state);
    out.overlaps[m] = std::norm(amp);
  }
  Eigen::Index dominant = 0;
  out.overlaps.maxCoeff(&dominant);
  out.dominant_index = static_cast<int>(dominant);
  out.target_fidelity = std::abs(target.vec().dot(final_state));
  return out;
}

}  // namespace qlyap
