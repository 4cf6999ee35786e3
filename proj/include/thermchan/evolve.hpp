#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "thermchan/density.hpp"
#include "thermchan/model.hpp"
#include "thermchan/qop.hpp"

namespace thermchan::evolve {

using qop::CMatrix;
using qop::CVector;

// Column stacking: v[i + d*j] = rho(i, j).
CVector vectorize(const CMatrix& rho);
CVector vectorize(const DensityMatrix& rho);
CMatrix unvectorize(const CVector& v);

// Superoperator acting on column-stacked density matrices.
struct Liouvillian {
  CMatrix matrix;
  std::size_t d = 0;
};

Liouvillian build_liouvillian(const qop::Operator& h, const model::CollapseSet& c);

CMatrix apply(const Liouvillian& l, const CMatrix& rho);

// Applies the Lindblad generator directly in operator form with sparse
// operators; used by the integrator instead of the d^2 x d^2 superoperator.
class LindbladGenerator {
 public:
  using Sparse = Eigen::SparseMatrix<qop::Complex>;

  LindbladGenerator(const qop::Operator& h, const model::CollapseSet& c);

  std::size_t dim() const { return d_; }
  void apply(const CMatrix& rho, CMatrix& out) const;
  // Same with a replacement Hamiltonian (time-dependent problems).
  void apply_with(const Sparse& h_eff, const CMatrix& rho, CMatrix& out) const;
  Sparse effective_hamiltonian(const qop::Operator& h) const;

  // Same generator for Hermitian rho only, the sole input the integrator
  // produces; the result is exactly Hermitian. work is scratch space.
  void apply_hermitian(Eigen::Ref<const CMatrix> rho, Eigen::Ref<CMatrix> out, CMatrix& work) const;

 private:
  // Nonzeros grouped by diagonal: entry i sits at (start + i + offset, start + i).
  struct Diagonal {
    Eigen::Index offset = 0;
    Eigen::Index start = 0;
    CVector values;
  };
  using Banded = std::vector<Diagonal>;
  static Banded banded(const Sparse& s);

  std::size_t d_;
  Banded h_band_;
  std::vector<Banded> jump_bands_;
  Sparse h_eff_;
  std::vector<Sparse> jumps_;
  std::vector<double> rates_;
  Sparse anti_;  // sum_j r_j C_j^dagger C_j
};

struct EvolveOptions {
  double tol = 1e-8;
  // Observable for p_e; defaults to |e><e| (x) I when the first subsystem is a qubit.
  std::optional<qop::Operator> observable;
  bool keep_states = false;
  double max_step = 0.0;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<double> p_e;
  std::vector<DensityMatrix> states;  // only with keep_states
  double trace_err_max = 0.0;
  double herm_err_max = 0.0;
  double min_eig_min = 0.0;
  std::size_t steps_taken = 0;
  std::size_t steps_rejected = 0;
};

// Adaptive RK integration of rho' = L[rho] sampled on t_grid (ascending, starting at 0).
EvolutionResult evolve_adaptive(const qop::Operator& h, const model::CollapseSet& c, const DensityMatrix& rho0,
                                std::span<const double> t_grid, const EvolveOptions& opts = {});

// Same with a time-dependent Hamiltonian (lab-frame validation path).
EvolutionResult evolve_adaptive_td(const std::function<qop::Operator(double)>& h_of_t, const model::CollapseSet& c,
                                   const DensityMatrix& rho0, std::span<const double> t_grid,
                                   const EvolveOptions& opts = {});

// Scaling-and-squaring Pade(13) matrix exponential.
CMatrix expm(const CMatrix& a);

// exp(L t) applied to rho0.
DensityMatrix propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, double t);

struct SteadyState {
  DensityMatrix rho;
  double sigma_min = 0.0;     // smallest singular value of L
  double sigma_second = 0.0;  // second smallest
  double clipped = 0.0;       // magnitude of negative eigenvalues removed
  double residual = 0.0;      // ||L vec(rho)|| / ||L||
};

// Least-squares null vector of L with the trace row appended. Throws
// DegenerateKernelError unless sigma_second > 1e3 * sigma_min.
SteadyState steady_state(const Liouvillian& l);

double population(const qop::Operator& observable, const DensityMatrix& rho);
std::optional<qop::Operator> default_observable(std::span<const std::size_t> dims);

}  // namespace thermchan::evolve
