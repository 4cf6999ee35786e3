#pragma once

#include "thermchan/qop.hpp"

namespace thermchan {

struct Physicality {
  double trace_error = 0.0;      // |Tr rho - 1|
  double hermiticity_error = 0.0;  // ||rho - rho^dagger||_F
  double min_eigenvalue = 0.0;
};

Physicality physicality(const qop::CMatrix& rho);

// Trace-one, Hermitian, positive semi-definite operator. The checked
// constructor enforces the invariants at 1e-10 / 1e-8 / -1e-8.
class DensityMatrix {
 public:
  explicit DensityMatrix(qop::CMatrix m);

  // Skips validation; for integrator samples that are reported, not trusted.
  static DensityMatrix unchecked(qop::CMatrix m);
  static DensityMatrix pure(const qop::CVector& psi);
  static DensityMatrix basis_state(std::size_t dim, std::size_t index);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const qop::CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  Physicality physicality() const { return thermchan::physicality(m_); }

 private:
  struct Unchecked {};
  DensityMatrix(qop::CMatrix m, Unchecked) : m_(std::move(m)) {}

  qop::CMatrix m_;
};

}  // namespace thermchan
