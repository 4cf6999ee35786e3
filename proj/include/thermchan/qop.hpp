#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thermchan {
class DensityMatrix;
}

namespace thermchan::qop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Qubit (x) resonator truncation. Composite index is qubit-major:
// |q, n> -> q * fock_dim + n with q = 0 for |e>, q = 1 for |g>.
struct HilbertDims {
  std::size_t qubit_dim = 2;
  std::size_t fock_dim = 2;

  std::size_t total() const { return qubit_dim * fock_dim; }
  std::size_t index(std::size_t q, std::size_t n) const { return q * fock_dim + n; }
};

inline constexpr std::size_t kExcited = 0;
inline constexpr std::size_t kGround = 1;

// Square complex matrix tagged with its subsystem dimensions. A plain
// single-factor tag {side} marks an operator without tensor structure.
class Operator {
 public:
  explicit Operator(CMatrix matrix);
  Operator(CMatrix matrix, std::vector<std::size_t> dims);
  Operator(CMatrix matrix, const HilbertDims& dims);

  const CMatrix& matrix() const { return matrix_; }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t side() const { return static_cast<std::size_t>(matrix_.rows()); }

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  void check_compatible(const Operator& other, const char* what) const;

  CMatrix matrix_;
  std::vector<std::size_t> dims_;
};

Operator identity(std::size_t n);
Operator zeros(std::size_t n);

// Tensor product; dims are concatenated.
Operator kron(const Operator& a, const Operator& b);

// Truncated ladder operator on n Fock levels: a[m-1, m] = sqrt(m).
Operator annihilation(std::size_t n);
Operator number(std::size_t n);

Operator dagger(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

enum class Pauli { z, x, plus, minus };

// 2x2 in the (|e>, |g>) ordering: sigma_z = diag(1, -1), sigma_plus = |e><g|.
Operator pauli(Pauli which);

// |i><j| on a space of side n.
Operator outer(std::size_t n, std::size_t i, std::size_t j);

double hermiticity_error(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double rel_tol = 1e-10);

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // orthonormal columns
};

// Throws ContractError when h is not Hermitian within 1e-10 (relative Frobenius).
Eigensystem herm_eig(const Operator& h);
Eigensystem herm_eig(const CMatrix& h);

Complex expect(const Operator& op, const DensityMatrix& rho);
Complex expect(const Operator& op, const CMatrix& rho);

}  // namespace thermchan::qop
