#include "qlyap/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace qlyap {

namespace {

std::string dim_string(Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix a, double tol) {
  if (a.rows() != a.cols()) {
    throw ValidationError("hermitian operator must be square, got " +
                          dim_string(a.rows(), a.cols()));
  }
  if (a.rows() < 2) {
    throw ValidationError("hermitian operator must be at least 2x2");
  }
  if (!a.allFinite()) {
    throw ValidationError("hermitian operator has non-finite entries");
  }
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |A - A^dagger| = " << asym
       << " exceeds " << tol;
    throw ValidationError(os.str());
  }
  m_ = 0.5 * (a + a.adjoint().eval());
}

QuantumState::QuantumState(Vector v, double tol) {
  if (v.rows() < 2) {
    throw ValidationError("state vector must have dimension >= 2");
  }
  if (!v.allFinite()) {
    throw ValidationError("state vector has non-finite entries");
  }
  const double n = v.norm();
  if (std::abs(n - 1.0) > tol) {
    std::ostringstream os;
    os << "state vector is not normalized: ||psi|| = " << n;
    throw ValidationError(os.str());
  }
  v_ = std::move(v);
}

Complex inner(const Vector& a, const Vector& b) {
  if (a.rows() != b.rows()) {
    throw ValidationError("inner product dimension mismatch: " +
                          std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()));
  }
  return a.dot(b);  // Eigen's dot conjugates the left argument
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ValidationError("commutator needs square matrices of equal size");
  }
  return a * b - b * a;
}

double expectation(const HermitianOperator& a, const QuantumState& psi) {
  if (a.dim() != psi.dim()) {
    throw ValidationError("expectation dimension mismatch");
  }
  const Complex val = psi.vec().dot(a.mat() * psi.vec());
  return val.real();
}

Spectrum eigendecompose(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian eigensolver failed to converge");
  }
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

bool is_positive_definite(const HermitianOperator& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    return false;
  }
  return solver.eigenvalues().minCoeff() > tol;
}

double min_eigenvalue(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian eigensolver failed to converge");
  }
  return solver.eigenvalues().minCoeff();
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  return std::abs(inner(a.vec(), b.vec()));
}

}  // namespace qlyap
