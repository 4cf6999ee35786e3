#include "thermchan/qop.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "thermchan/density.hpp"
#include "thermchan/errors.hpp"

namespace thermchan::qop {

namespace {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Operator::Operator(CMatrix matrix) : Operator(std::move(matrix), std::vector<std::size_t>{}) {}

Operator::Operator(CMatrix matrix, std::vector<std::size_t> dims) : matrix_(std::move(matrix)), dims_(std::move(dims)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw DimensionError("operator matrix must be square, got " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()));
  }
  if (dims_.empty()) dims_.push_back(side());
  if (product(dims_) != side()) throw DimensionError("subsystem dimensions do not multiply to the operator side");
  if (!matrix_.allFinite()) throw DomainError("operator has non-finite entries");
}

Operator::Operator(CMatrix matrix, const HilbertDims& dims)
    : Operator(std::move(matrix), std::vector<std::size_t>{dims.qubit_dim, dims.fock_dim}) {}

void Operator::check_compatible(const Operator& other, const char* what) const {
  if (side() != other.side()) {
    throw DimensionError(std::string(what) + ": side mismatch " + std::to_string(side()) + " vs " +
                         std::to_string(other.side()));
  }
}

Operator& Operator::operator+=(const Operator& other) {
  check_compatible(other, "operator+");
  matrix_ += other.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  check_compatible(other, "operator-");
  matrix_ -= other.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  matrix_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  a.check_compatible(b, "operator*");
  return Operator(a.matrix_ * b.matrix_, a.dims_);
}

Operator identity(std::size_t n) { return Operator(CMatrix::Identity(n, n)); }

Operator zeros(std::size_t n) { return Operator(CMatrix::Zero(n, n)); }

Operator kron(const Operator& a, const Operator& b) {
  const auto sa = static_cast<Eigen::Index>(a.side());
  const auto sb = static_cast<Eigen::Index>(b.side());
  CMatrix out(sa * sb, sa * sb);
  for (Eigen::Index i = 0; i < sa; ++i) {
    for (Eigen::Index j = 0; j < sa; ++j) {
      out.block(i * sb, j * sb, sb, sb) = a.matrix()(i, j) * b.matrix();
    }
  }
  std::vector<std::size_t> dims(a.dims().begin(), a.dims().end());
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Operator(std::move(out), std::move(dims));
}

Operator annihilation(std::size_t n) {
  if (n < 2) throw DimensionError("annihilation operator needs at least 2 Fock levels, got " + std::to_string(n));
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t m = 1; m < n; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return Operator(std::move(a));
}

Operator number(std::size_t n) {
  const auto a = annihilation(n);
  return dagger(a) * a;
}

Operator dagger(const Operator& a) {
  return Operator(a.matrix().adjoint(), std::vector<std::size_t>(a.dims().begin(), a.dims().end()));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator pauli(Pauli which) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (which) {
    case Pauli::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::plus:
      m(kExcited, kGround) = 1.0;
      break;
    case Pauli::minus:
      m(kGround, kExcited) = 1.0;
      break;
  }
  return Operator(std::move(m));
}

Operator outer(std::size_t n, std::size_t i, std::size_t j) {
  if (i >= n || j >= n) throw DimensionError("outer product index out of range");
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m(i, j) = 1.0;
  return Operator(std::move(m));
}

double hermiticity_error(const CMatrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_error(m) <= rel_tol * m.norm();
}

Eigensystem herm_eig(const Operator& h) { return herm_eig(h.matrix()); }

Eigensystem herm_eig(const CMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionError("herm_eig needs a square matrix");
  if (!is_hermitian(h)) {
    throw ContractError("herm_eig input is not Hermitian (relative error " +
                        std::to_string(hermiticity_error(h) / h.norm()) + ")");
  }
  // Symmetrize so round-off in the lower triangle cannot leak in.
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Complex expect(const Operator& op, const CMatrix& rho) {
  if (static_cast<Eigen::Index>(op.side()) != rho.rows() || rho.rows() != rho.cols()) {
    throw DimensionError("expect: operator side " + std::to_string(op.side()) + " vs state " +
                         std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
  }
  // Tr(A rho) without forming the product.
  return (op.matrix().transpose().cwiseProduct(rho)).sum();
}

Complex expect(const Operator& op, const DensityMatrix& rho) { return expect(op, rho.matrix()); }

}  // namespace thermchan::qop
