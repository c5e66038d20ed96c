#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qlyap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Bad input: shapes, hermiticity, normalization, sign constraints, config fields.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric failure: eigensolver did not converge, non-finite values appeared.
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hermitian matrix, symmetrized at construction. Inputs may carry roundoff
// asymmetry up to kHermTol in max norm; anything larger is rejected rather
// than silently averaged away.
class HermitianOperator {
 public:
  static constexpr double kHermTol = 1e-12;

  explicit HermitianOperator(Matrix a, double tol = kHermTol);

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Unit-norm state vector. Construction rejects norms off by more than kNormTol.
class QuantumState {
 public:
  static constexpr double kNormTol = 1e-9;

  explicit QuantumState(Vector v, double tol = kNormTol);

  const Vector& vec() const { return v_; }
  Eigen::Index dim() const { return v_.rows(); }

 private:
  Vector v_;
};

// Eigendecomposition of a Hermitian operator, eigenvalues ascending,
// eigenvector i in column i.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
};

// <a|b>, conjugate-linear in the first argument.
Complex inner(const Vector& a, const Vector& b);

// ab - ba. Anti-Hermitian when both inputs are Hermitian.
Matrix commutator(const Matrix& a, const Matrix& b);

// <psi|A|psi> as a real number. The imaginary residue of the quadratic form
// is pure roundoff for Hermitian A and is discarded.
double expectation(const HermitianOperator& a, const QuantumState& psi);

Spectrum eigendecompose(const HermitianOperator& a);

// True iff the smallest eigenvalue exceeds tol.
bool is_positive_definite(const HermitianOperator& a, double tol = 0.0);

double min_eigenvalue(const HermitianOperator& a);

// |<a|b>|, phase-invariant state overlap in [0, 1].
double fidelity(const QuantumState& a, const QuantumState& b);

}  // namespace qlyap
