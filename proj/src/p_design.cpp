#include "qlyap/p_design.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qlyap {

namespace {

Spectrum nondegenerate_h0_spectrum(const ControlledSystem& sys, double tol,
                                   const char* who) {
  Spectrum spec = eigendecompose(sys.h0());
  for (Eigen::Index i = 0; i + 1 < spec.eigenvalues.size(); ++i) {
    if (spec.eigenvalues[i + 1] - spec.eigenvalues[i] <= tol) {
      std::ostringstream os;
      os << who << " needs a nondegenerate drift spectrum; eigenvalues " << i + 1
         << " and " << i + 2 << " differ by "
         << spec.eigenvalues[i + 1] - spec.eigenvalues[i];
      throw ValidationError(os.str());
    }
  }
  return spec;
}

// mt19937_64 -> [0, 1), bit-stable across platforms unlike the
// std:: distributions.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

HermitianOperator build_commuting_p(const ControlledSystem& sys,
                                    const Eigen::VectorXd& eigenvalues) {
  const Spectrum spec =
      nondegenerate_h0_spectrum(sys, 1e-9, "commuting P construction");
  if (eigenvalues.size() != sys.dim()) {
    throw ValidationError("commuting P needs exactly one eigenvalue per level");
  }
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0) || !std::isfinite(eigenvalues[i])) {
      std::ostringstream os;
      os << "P eigenvalue " << i + 1 << " must be positive, got "
         << eigenvalues[i];
      throw ValidationError(os.str());
    }
  }
  Matrix p = spec.eigenvectors *
             eigenvalues.cast<Complex>().asDiagonal() *
             spec.eigenvectors.adjoint();
  return HermitianOperator(std::move(p));
}

SpectralSynthesis build_spectral_p(const Matrix& vectors,
                                   const Eigen::VectorXd& eigenvalues) {
  if (vectors.rows() != vectors.cols()) {
    throw ValidationError("spectral P needs a full set of basis vectors");
  }
  if (eigenvalues.size() != vectors.cols()) {
    throw ValidationError("spectral P needs one eigenvalue per vector");
  }
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] > 0.0) || !std::isfinite(eigenvalues[i])) {
      std::ostringstream os;
      os << "P eigenvalue " << i + 1 << " must be positive, got "
         << eigenvalues[i];
      throw ValidationError(os.str());
    }
  }

  Matrix q = vectors;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double original = q.col(j).norm();
    for (Eigen::Index k = 0; k < j; ++k) {
      q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    }
    const double remaining = q.col(j).norm();
    if (!(original > 0.0) || remaining <= 1e-10 * original) {
      std::ostringstream os;
      os << "vector " << j + 1
         << " is linearly dependent on its predecessors; cannot orthonormalize";
      throw ValidationError(os.str());
    }
    q.col(j) /= remaining;
  }

  Matrix p = q * eigenvalues.cast<Complex>().asDiagonal() * q.adjoint();
  return SpectralSynthesis{HermitianOperator(std::move(p)), std::move(q)};
}

OffdiagonalCheck check_offdiagonal_condition(const HermitianOperator& p,
                                             const ControlledSystem& sys,
                                             double tol) {
  if (p.dim() != sys.dim()) {
    throw ValidationError("weight operator dimension does not match the system");
  }
  const Spectrum spec =
      nondegenerate_h0_spectrum(sys, 1e-9, "off-diagonal condition check");
  const Matrix in_basis =
      spec.eigenvectors.adjoint() * p.mat() * spec.eigenvectors;

  OffdiagonalCheck out;
  out.min_offdiagonal = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < in_basis.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < in_basis.cols(); ++j) {
      const double mag = std::abs(in_basis(i, j));
      if (mag < out.min_offdiagonal) {
        out.min_offdiagonal = mag;
        out.row = static_cast<int>(i);
        out.col = static_cast<int>(j);
      }
    }
  }
  out.threshold =
      tol < 0.0 ? 1e-6 * in_basis.cwiseAbs().maxCoeff() : tol;
  out.ok = out.min_offdiagonal > out.threshold;
  return out;
}

HermitianOperator generate_random_p(const ControlledSystem& sys,
                                    std::uint64_t seed, double min_offdiag,
                                    double min_eig) {
  if (!(min_offdiag > 0.0) || !(min_eig > 0.0)) {
    throw ValidationError(
        "random P needs positive min_offdiag and min_eigenvalue");
  }
  const Spectrum spec =
      nondegenerate_h0_spectrum(sys, 1e-9, "random P generation");
  const Eigen::Index n = sys.dim();
  std::mt19937_64 rng(seed);

  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix tilde = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      tilde(i, i) = Complex(1.0 + uniform01(rng), 0.0);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        // magnitude kept strictly above the floor, phase free
        const double mag = min_offdiag * (1.1 + uniform01(rng));
        const double phase = 2.0 * M_PI * uniform01(rng);
        tilde(i, j) = std::polar(mag, phase);
        tilde(j, i) = std::conj(tilde(i, j));
      }
    }

    const double mu = min_eigenvalue(HermitianOperator(tilde));
    if (mu <= min_eig) {
      const double shift = min_eig + std::abs(mu) + 1e-6;
      tilde += shift * Matrix::Identity(n, n);
    }

    Matrix p = spec.eigenvectors * tilde * spec.eigenvectors.adjoint();
    HermitianOperator candidate(std::move(p));
    if (!is_positive_definite(candidate, min_eig)) {
      continue;
    }
    const OffdiagonalCheck od =
        check_offdiagonal_condition(candidate, sys, min_offdiag);
    if (!od.ok) {
      continue;
    }
    return candidate;
  }
  throw NumericError(
      "random P generation exhausted its retry budget (100 attempts)");
}

HermitianOperator build_p(const ControlledSystem& sys, const PSpec& spec) {
  return std::visit(
      [&](const auto& s) -> HermitianOperator {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CommutingPSpec>) {
          return build_commuting_p(sys, s.eigenvalues);
        } else if constexpr (std::is_same_v<T, SpectralPSpec>) {
          SpectralSynthesis synth = build_spectral_p(s.vectors, s.eigenvalues);
          if (synth.p.dim() != sys.dim()) {
            throw ValidationError("spectral P dimension does not match the system");
          }
          return synth.p;
        } else if constexpr (std::is_same_v<T, ExplicitPSpec>) {
          HermitianOperator p(s.matrix);
          if (p.dim() != sys.dim()) {
            throw ValidationError("explicit P dimension does not match the system");
          }
          return p;
        } else {
          return generate_random_p(sys, s.seed, s.min_offdiag, s.min_eigenvalue);
        }
      },
      spec);
}

}  // namespace qlyap
