#include "qlyap/system.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlyap {

ControlledSystem::ControlledSystem(HermitianOperator h0,
                                   std::vector<HermitianOperator> controls,
                                   double hbar)
    : h0_(std::move(h0)), controls_(std::move(controls)), hbar_(hbar) {
  if (controls_.empty()) {
    throw ValidationError("system needs at least one control Hamiltonian");
  }
  for (size_t k = 0; k < controls_.size(); ++k) {
    if (controls_[k].dim() != h0_.dim()) {
      std::ostringstream os;
      os << "control " << k + 1 << " is " << controls_[k].dim() << "x"
         << controls_[k].dim() << " but the drift is " << h0_.dim() << "x"
         << h0_.dim();
      throw ValidationError(os.str());
    }
  }
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) {
    throw ValidationError("hbar must be positive and finite");
  }
}

GapCheck check_lambda_nondegenerate(const ControlledSystem& sys, double tol) {
  const Spectrum spec = eigendecompose(sys.h0());
  const auto& lam = spec.eigenvalues;
  const int n = static_cast<int>(lam.size());

  GapCheck out;
  out.min_eigenvalue_gap = std::numeric_limits<double>::infinity();
  out.min_gap_separation = std::numeric_limits<double>::infinity();

  struct Gap {
    double value;
    int i, j;
  };
  std::vector<Gap> gaps;
  gaps.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double g = lam[j] - lam[i];
      gaps.push_back({g, i, j});
      out.min_eigenvalue_gap = std::min(out.min_eigenvalue_gap, g);
      if (g <= tol) {
        out.degenerate_pairs.push_back({i, j});
      }
    }
  }
  for (size_t a = 0; a < gaps.size(); ++a) {
    for (size_t b = a + 1; b < gaps.size(); ++b) {
      const double d = std::abs(gaps[a].value - gaps[b].value);
      out.min_gap_separation = std::min(out.min_gap_separation, d);
      if (d <= tol) {
        out.colliding_gap_pairs.push_back(
            {gaps[a].i, gaps[a].j, gaps[b].i, gaps[b].j});
      }
    }
  }
  out.ok = out.degenerate_pairs.empty() && out.colliding_gap_pairs.empty();
  return out;
}

namespace {

// Real coordinates of the traceless part of an anti-Hermitian matrix:
// imaginary diagonal plus re/im of the upper triangle.
Eigen::VectorXd vectorize_su(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Complex tr = a.trace() / static_cast<double>(n);
  Eigen::VectorXd v(n * n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    v[idx++] = (a(i, i) - tr).imag();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v[idx++] = a(i, j).real();
      v[idx++] = a(i, j).imag();
    }
  }
  return v;
}

}  // namespace

LieRankCheck check_controllability(const ControlledSystem& sys, double tol) {
  const Eigen::Index n = sys.dim();
  LieRankCheck out;
  out.required = static_cast<int>(n * n) - 1;

  std::vector<Matrix> gens;
  const Complex iu(0.0, 1.0);
  gens.push_back(iu * sys.h0().mat());
  for (const auto& hk : sys.controls()) {
    gens.push_back(iu * hk.mat());
  }

  // Span maintenance uses modified Gram-Schmidt with a generous threshold;
  // the reported rank comes from an SVD of everything that was kept.
  std::vector<Eigen::VectorXd> basis_vecs;
  std::vector<Matrix> basis_mats;
  auto try_add = [&](const Matrix& m) {
    Eigen::VectorXd v = vectorize_su(m);
    const double scale = v.norm();
    if (!(scale > 0.0) || !v.allFinite()) {
      return false;
    }
    for (const auto& b : basis_vecs) {
      v -= b.dot(v) * b;
    }
    if (v.norm() <= 1e-10 * scale) {
      return false;
    }
    basis_vecs.push_back(v.normalized());
    basis_mats.push_back(m);
    return true;
  };

  for (const auto& g : gens) {
    try_add(g);
  }

  const int max_rounds = static_cast<int>(n * n);
  bool grew = true;
  int round = 0;
  while (grew && static_cast<Eigen::Index>(basis_vecs.size()) < n * n - 1) {
    if (round++ >= max_rounds) {
      out.budget_exhausted = true;
      break;
    }
    grew = false;
    const size_t snapshot = basis_mats.size();
    for (const auto& g : gens) {
      for (size_t b = 0; b < snapshot; ++b) {
        if (try_add(commutator(g, basis_mats[b]))) {
          grew = true;
        }
      }
    }
  }

  if (basis_vecs.empty()) {
    return out;
  }
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(basis_vecs.size()), n * n);
  for (size_t i = 0; i < basis_vecs.size(); ++i) {
    stacked.row(static_cast<Eigen::Index>(i)) = basis_vecs[i].transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv[0];
  out.rank = static_cast<int>((sv.array() > cutoff).count());
  out.ok = out.rank >= out.required;
  return out;
}

TargetCheck check_target_assumptions(const ControlledSystem& sys,
                                     const QuantumState& target, double tol) {
  if (target.dim() != sys.dim()) {
    throw ValidationError("target dimension does not match the system");
  }
  TargetCheck out;
  const Vector& psi = target.vec();

  out.lambda_f = expectation(sys.h0(), target);
  out.h0_residual = (sys.h0().mat() * psi - out.lambda_f * psi).norm();
  out.h0_eigenstate = out.h0_residual <= tol;

  out.control_residuals.reserve(sys.num_controls());
  for (int k = 0; k < sys.num_controls(); ++k) {
    const double mean = expectation(sys.control(k), target);
    const double res = (sys.control(k).mat() * psi - mean * psi).norm();
    out.control_residuals.push_back(res);
    if (res <= tol) {
      out.control_eigenstate_of.push_back(k);
    }
  }
  out.ok = out.h0_eigenstate && out.control_eigenstate_of.empty();
  return out;
}

CommonEigenvectorCheck check_no_common_eigenvector(const ControlledSystem& sys,
                                                   double tol) {
  CommonEigenvectorCheck out;
  if (sys.num_controls() < 2) {
    out.vacuous = true;
    out.ok = true;
    return out;
  }

  // Any simultaneous eigenvector must in particular be an eigenvector of the
  // first control, so its eigenbasis is the candidate set. Degenerate
  // eigenspaces make that basis non-unique; flag them.
  const Spectrum spec = eigendecompose(sys.control(0));
  for (Eigen::Index i = 0; i + 1 < spec.eigenvalues.size(); ++i) {
    if (spec.eigenvalues[i + 1] - spec.eigenvalues[i] <= tol) {
      out.degenerate_flag = true;
    }
  }

  out.worst_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spec.eigenvectors.cols(); ++i) {
    const Vector v = spec.eigenvectors.col(i);
    double max_res = 0.0;
    for (int k = 1; k < sys.num_controls(); ++k) {
      const Complex mean = v.dot(sys.control(k).mat() * v);
      const double res = (sys.control(k).mat() * v - mean * v).norm();
      max_res = std::max(max_res, res);
    }
    if (max_res < out.worst_margin) {
      out.worst_margin = max_res;
      out.offending_index = static_cast<int>(i);
    }
  }
  out.ok = out.worst_margin > tol;
  return out;
}

AssumptionReport check_all_assumptions(const ControlledSystem& sys,
                                       const QuantumState& target) {
  AssumptionReport report;
  report.gaps = check_lambda_nondegenerate(sys);
  report.lie = check_controllability(sys);
  report.target = check_target_assumptions(sys, target);
  report.common = check_no_common_eigenvector(sys);
  return report;
}

HermitianOperator hamiltonian_at(const ControlledSystem& sys,
                                 const Eigen::VectorXd& u) {
  if (u.size() != sys.num_controls()) {
    throw ValidationError("control vector has wrong length");
  }
  if (!u.allFinite()) {
    throw NumericError("control vector has non-finite entries");
  }
  Matrix h = sys.h0().mat();
  for (int k = 0; k < sys.num_controls(); ++k) {
    h += u[k] * sys.control(k).mat();
  }
  return HermitianOperator(std::move(h));
}

}  // namespace qlyap
