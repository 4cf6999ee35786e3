#include "thermchan/density.hpp"

#include <cmath>

#include "thermchan/errors.hpp"

namespace thermchan {

Physicality physicality(const qop::CMatrix& rho) {
  Physicality p;
  p.trace_error = std::abs(rho.trace() - qop::Complex(1.0, 0.0));
  p.hermiticity_error = qop::hermiticity_error(rho);
  const qop::CMatrix sym = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<qop::CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  p.min_eigenvalue = solver.eigenvalues().minCoeff();
  return p;
}

DensityMatrix::DensityMatrix(qop::CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw DimensionError("density matrix must be square and non-empty");
  if (!m_.allFinite()) throw DomainError("density matrix has non-finite entries");
  const auto p = thermchan::physicality(m_);
  if (p.hermiticity_error > 1e-10) throw ContractError("density matrix is not Hermitian");
  if (p.trace_error > 1e-8) throw ContractError("density matrix trace differs from 1");
  if (p.min_eigenvalue < -1e-8) throw ContractError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::unchecked(qop::CMatrix m) { return DensityMatrix(std::move(m), Unchecked{}); }

DensityMatrix DensityMatrix::pure(const qop::CVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw DomainError("cannot build a pure state from the zero vector");
  const qop::CVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("basis index out of range");
  qop::CMatrix m = qop::CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(qop::CMatrix::Identity(n, n) / static_cast<double>(dim));
}

}  // namespace thermchan
