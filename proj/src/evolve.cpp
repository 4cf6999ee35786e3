#include "thermchan/evolve.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "thermchan/errors.hpp"
#include "thermchan/ode.hpp"

namespace thermchan::evolve {

using qop::Complex;
using qop::kI;

CVector vectorize(const CMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("vectorize needs a square matrix");
  // Eigen storage is column-major, which is exactly column stacking.
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

CMatrix unvectorize(const CVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw DimensionError("vector length " + std::to_string(v.size()) + " is not a perfect square");
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

Liouvillian build_liouvillian(const qop::Operator& h, const model::CollapseSet& c) {
  const auto d = static_cast<Eigen::Index>(h.side());
  const CMatrix id = CMatrix::Identity(d, d);
  const auto& hm = h.matrix();
  CMatrix l = -kI * (Eigen::kroneckerProduct(id, hm).eval() - Eigen::kroneckerProduct(hm.transpose(), id).eval());
  for (const auto& [op, rate] : c) {
    if (op.side() != h.side()) throw DimensionError("collapse operator does not match the Hamiltonian dimension");
    if (rate < 0.0) throw DomainError("collapse rates must be non-negative");
    if (rate == 0.0) continue;
    const auto& cm = op.matrix();
    const CMatrix cdc = cm.adjoint() * cm;
    l += rate * (Eigen::kroneckerProduct(cm.conjugate(), cm).eval() - 0.5 * Eigen::kroneckerProduct(id, cdc).eval() -
                 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval());
  }
  return {std::move(l), static_cast<std::size_t>(d)};
}

CMatrix apply(const Liouvillian& l, const CMatrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != l.d) throw DimensionError("state does not match the Liouvillian");
  return unvectorize(l.matrix * vectorize(rho));
}

LindbladGenerator::LindbladGenerator(const qop::Operator& h, const model::CollapseSet& c) : d_(h.side()) {
  const auto d = static_cast<Eigen::Index>(d_);
  anti_.resize(d, d);
  for (const auto& [op, rate] : c) {
    if (op.side() != d_) throw DimensionError("collapse operator does not match the Hamiltonian dimension");
    if (rate < 0.0) throw DomainError("collapse rates must be non-negative");
    if (rate == 0.0) continue;
    Sparse s = op.matrix().sparseView();
    anti_ += rate * Sparse(s.adjoint() * s);
    jumps_.push_back(std::move(s));
    rates_.push_back(rate);
  }
  h_eff_ = effective_hamiltonian(h);
  h_band_ = banded(h_eff_);
  for (const auto& s : jumps_) jump_bands_.push_back(banded(s));
}

LindbladGenerator::Banded LindbladGenerator::banded(const Sparse& s) {
  const auto d = s.rows();
  std::map<Eigen::Index, Diagonal> by_offset;
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (Sparse::InnerIterator it(s, k); it; ++it) {
      if (it.value() == Complex(0.0)) continue;
      const Eigen::Index off = it.row() - it.col();
      auto [pos, fresh] = by_offset.try_emplace(off);
      auto& dg = pos->second;
      if (fresh) {
        dg.offset = off;
        dg.start = std::max<Eigen::Index>(0, -off);
        dg.values = CVector::Zero(d - std::abs(off));
      }
      dg.values(it.col() - dg.start) = it.value();
    }
  }
  Banded out;
  for (auto& [off, dg] : by_offset) out.push_back(std::move(dg));
  return out;
}

void LindbladGenerator::apply_hermitian(Eigen::Ref<const CMatrix> rho, Eigen::Ref<CMatrix> out, CMatrix& work) const {
  // L[rho] = A + A^dagger with A = -i H_eff rho + (1/2) sum_j r_j C_j rho C_j^dagger.
  const auto d = static_cast<Eigen::Index>(d_);
  work.setZero(d, d);
  for (const auto& dg : h_band_) {
    const auto n = dg.values.size();
    work.middleRows(dg.start + dg.offset, n).noalias() +=
        (-kI * dg.values).asDiagonal() * rho.middleRows(dg.start, n);
  }
  for (std::size_t j = 0; j < jump_bands_.size(); ++j) {
    const double half = 0.5 * rates_[j];
    for (const auto& a : jump_bands_[j]) {
      for (const auto& b : jump_bands_[j]) {
        const auto na = a.values.size(), nb = b.values.size();
        work.block(a.start + a.offset, b.start + b.offset, na, nb).noalias() +=
            (half * a.values).asDiagonal() * rho.block(a.start, b.start, na, nb) *
            b.values.conjugate().asDiagonal();
      }
    }
  }
  out = work + work.adjoint();
}

LindbladGenerator::Sparse LindbladGenerator::effective_hamiltonian(const qop::Operator& h) const {
  if (h.side() != d_) throw DimensionError("Hamiltonian dimension changed");
  Sparse hs = h.matrix().sparseView();
  return hs - Complex(0.0, 0.5) * anti_;
}

void LindbladGenerator::apply(const CMatrix& rho, CMatrix& out) const { apply_with(h_eff_, rho, out); }

namespace {

// out += s * rho, column by column over the nonzeros of s.
void add_left(const LindbladGenerator::Sparse& s, Complex scale, const CMatrix& rho, CMatrix& out) {
  for (Eigen::Index j = 0; j < rho.cols(); ++j) {
    for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
      const Complex r = scale * rho(k, j);
      if (r == Complex(0.0)) continue;
      for (LindbladGenerator::Sparse::InnerIterator it(s, k); it; ++it) out(it.row(), j) += it.value() * r;
    }
  }
}

// out += scale * rho * s^dagger, i.e. out(:, i) += scale * conj(s(i, k)) * rho(:, k).
void add_right_adjoint(const LindbladGenerator::Sparse& s, Complex scale, const CMatrix& rho, CMatrix& out) {
  for (Eigen::Index k = 0; k < s.outerSize(); ++k) {
    for (LindbladGenerator::Sparse::InnerIterator it(s, k); it; ++it) {
      out.col(it.row()) += (scale * std::conj(it.value())) * rho.col(k);
    }
  }
}

}  // namespace

void LindbladGenerator::apply_with(const Sparse& h_eff, const CMatrix& rho, CMatrix& out) const {
  // -i (H_eff rho - rho H_eff^dagger) + sum_j r_j C_j rho C_j^dagger
  const auto d = rho.rows();
  out.setZero(d, d);
  add_left(h_eff, -kI, rho, out);
  add_right_adjoint(h_eff, kI, rho, out);
  CMatrix w(d, d);
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    w.setZero();
    add_right_adjoint(jumps_[j], rates_[j], rho, w);
    add_left(jumps_[j], 1.0, w, out);
  }
}

std::optional<qop::Operator> default_observable(std::span<const std::size_t> dims) {
  if (dims.empty() || dims.front() != 2) return std::nullopt;
  std::size_t rest = 1;
  for (std::size_t i = 1; i < dims.size(); ++i) rest *= dims[i];
  const auto pe = qop::outer(2, qop::kExcited, qop::kExcited);
  if (rest == 1) return pe;
  auto op = qop::kron(pe, qop::identity(rest));
  return qop::Operator(op.matrix(), std::vector<std::size_t>(dims.begin(), dims.end()));
}

double population(const qop::Operator& observable, const DensityMatrix& rho) {
  return qop::expect(observable, rho).real();
}

namespace {

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw ContractError("time grid is empty");
  if (t_grid.front() != 0.0) throw ContractError("time grid must start at 0");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw ContractError("time grid must be ascending");
}

void check_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw ContractError("tolerance must lie in [1e-12, 1e-4]");
}

EvolutionResult run(const ode::Rhs& rhs, const DensityMatrix& rho0, std::span<const double> t_grid,
                    const std::optional<qop::Operator>& observable, const EvolveOptions& opts) {
  EvolutionResult res;
  res.times.assign(t_grid.begin(), t_grid.end());
  if (observable) res.p_e.resize(t_grid.size());
  if (opts.keep_states) res.states.reserve(t_grid.size());
  res.min_eig_min = std::numeric_limits<double>::infinity();

  ode::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  o.max_step = opts.max_step;
  const auto d = static_cast<Eigen::Index>(rho0.dim());
  o.project = [d](ode::State& y) {
    Eigen::Map<CMatrix> m(y.data(), d, d);
    m = (0.5 * (m + m.adjoint())).eval();
  };
  ode::State y0 = vectorize(rho0);
  o.project(y0);
  const auto stats = ode::integrate_dopri5(rhs, y0, t_grid, o,
                                           [&](std::size_t i, double, const ode::State& y) {
                                             auto rho = DensityMatrix::unchecked(unvectorize(y));
                                             const auto ph = rho.physicality();
                                             res.trace_err_max = std::max(res.trace_err_max, ph.trace_error);
                                             res.herm_err_max = std::max(res.herm_err_max, ph.hermiticity_error);
                                             res.min_eig_min = std::min(res.min_eig_min, ph.min_eigenvalue);
                                             if (observable) res.p_e[i] = population(*observable, rho);
                                             if (opts.keep_states) res.states.push_back(std::move(rho));
                                           });
  res.steps_taken = stats.accepted;
  res.steps_rejected = stats.rejected;
  return res;
}

}  // namespace

EvolutionResult evolve_adaptive(const qop::Operator& h, const model::CollapseSet& c, const DensityMatrix& rho0,
                                std::span<const double> t_grid, const EvolveOptions& opts) {
  check_grid(t_grid);
  check_tol(opts.tol);
  if (rho0.dim() != h.side()) throw DimensionError("initial state does not match the Hamiltonian dimension");
  const LindbladGenerator gen(h, c);
  const auto d = static_cast<Eigen::Index>(gen.dim());
  CMatrix work(d, d);
  ode::Rhs rhs = [&gen, &work, d](double, const ode::State& y, ode::State& dy) {
    dy.resize(y.size());
    gen.apply_hermitian(Eigen::Map<const CMatrix>(y.data(), d, d), Eigen::Map<CMatrix>(dy.data(), d, d), work);
  };
  const auto obs = opts.observable ? opts.observable : default_observable(h.dims());
  return run(rhs, rho0, t_grid, obs, opts);
}

EvolutionResult evolve_adaptive_td(const std::function<qop::Operator(double)>& h_of_t, const model::CollapseSet& c,
                                   const DensityMatrix& rho0, std::span<const double> t_grid,
                                   const EvolveOptions& opts) {
  check_grid(t_grid);
  check_tol(opts.tol);
  const auto h0 = h_of_t(t_grid.front());
  if (rho0.dim() != h0.side()) throw DimensionError("initial state does not match the Hamiltonian dimension");
  const LindbladGenerator gen(h0, c);
  const auto d = static_cast<Eigen::Index>(gen.dim());
  ode::Rhs rhs = [&](double t, const ode::State& y, ode::State& dy) {
    const Eigen::Map<const CMatrix> rho(y.data(), d, d);
    CMatrix out(d, d);
    gen.apply_with(gen.effective_hamiltonian(h_of_t(t)), rho, out);
    dy = Eigen::Map<const CVector>(out.data(), out.size());
  };
  const auto obs = opts.observable ? opts.observable : default_observable(h0.dims());
  return run(rhs, rho0, t_grid, obs, opts);
}

CMatrix expm(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("expm needs a square matrix");
  const auto n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  if (n == 0) return id;
  constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
                          129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
                          1323241920.0,        40840800.0,          960960.0,           16380.0,
                          182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw DomainError("expm input is not finite");
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const CMatrix as = a / std::ldexp(1.0, s);
  const CMatrix a2 = as * as;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

DensityMatrix propagate_expm(const Liouvillian& l, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw DomainError("propagation time must be non-negative");
  if (rho0.dim() != l.d) throw DimensionError("state does not match the Liouvillian");
  if (t == 0.0) return rho0;
  const CVector v = expm(l.matrix * t) * vectorize(rho0);
  return DensityMatrix::unchecked(unvectorize(v));
}

namespace {

// Two smallest singular values of an upper-triangular R by block inverse
// iteration on (R^dagger R)^{-1} followed by Rayleigh-Ritz. Ritz values bound
// the true ones from above, so a genuinely two-dimensional kernel is never
// missed: both kernel directions dominate the iteration immediately.
std::pair<double, double> smallest_singular_pair(const CMatrix& r) {
  const auto n = r.rows();
  constexpr Eigen::Index kBlock = 3;
  constexpr int kSweeps = 12;
  const auto k = std::min<Eigen::Index>(kBlock, n);
  CMatrix rr = r;
  const double floor = 1e-32 * std::max(1.0, r.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(rr(i, i)) < floor) rr(i, i) = floor;
  }
  const auto upper = rr.triangularView<Eigen::Upper>();
  // Deterministic start: spread-out columns that overlap every direction.
  CMatrix x(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = std::polar(1.0, 0.7 * static_cast<double>((i + 1) * (j + 1)));
  }
  for (int s = 0; s < kSweeps; ++s) {
    CMatrix z = upper.adjoint().solve(x);
    x = upper.solve(z);
    x = Eigen::HouseholderQR<CMatrix>(x).householderQ() * CMatrix::Identity(n, k);
  }
  const CMatrix b = r.triangularView<Eigen::Upper>() * x;
  Eigen::JacobiSVD<CMatrix> svd(b);
  const auto& sv = svd.singularValues();
  return {sv(k - 1), k >= 2 ? sv(k - 2) : std::numeric_limits<double>::infinity()};
}

}  // namespace

SteadyState steady_state(const Liouvillian& l) {
  const auto n = l.matrix.rows();
  const auto d = static_cast<Eigen::Index>(l.d);
  if (n != d * d || n < 2) throw DimensionError("Liouvillian side must be d^2");

  // L = Q R; L and R share singular values.
  const Eigen::HouseholderQR<CMatrix> qr(l.matrix);
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  const auto [smin, s2] = smallest_singular_pair(r);
  if (!(s2 > 1e3 * smin)) throw DegenerateKernelError(smin, s2);

  // Least squares for [L; tr] x = [0; 1]. The residual is
  // ||R x||^2 + |tr^T x - 1|^2; Givens rotations fold the trace row into R.
  CVector extra = CVector::Zero(n);
  for (Eigen::Index i = 0; i < d; ++i) extra(i + d * i) = 1.0;
  CVector rhs = CVector::Zero(n);
  Complex rhs_extra = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (extra(i) == Complex(0.0)) continue;
    // G = [conj(c) conj(s); -s c] maps (r_ii, extra_i) to (rho, 0).
    const double nrm = std::hypot(std::abs(r(i, i)), std::abs(extra(i)));
    const Complex c = r(i, i) / nrm, sn = extra(i) / nrm;
    for (Eigen::Index j = i; j < n; ++j) {
      const Complex a = r(i, j), b = extra(j);
      r(i, j) = std::conj(c) * a + std::conj(sn) * b;
      extra(j) = -sn * a + c * b;
    }
    const Complex a = rhs(i), b = rhs_extra;
    rhs(i) = std::conj(c) * a + std::conj(sn) * b;
    rhs_extra = -sn * a + c * b;
  }
  const CVector x = r.triangularView<Eigen::Upper>().solve(rhs);

  CMatrix rho = unvectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho);
  Eigen::VectorXd w = eig.eigenvalues();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -1e-10) {
      clipped = std::max(clipped, -w(i));
      w(i) = 0.0;
    }
  }
  if (clipped > 0.0) rho = eig.eigenvectors() * w.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const double lnorm = l.matrix.norm();
  const double residual = (l.matrix * vectorize(rho)).norm() / (lnorm > 0.0 ? lnorm : 1.0);
  return {DensityMatrix::unchecked(std::move(rho)), smin, s2, clipped, residual};
}

}  // namespace thermchan::evolve
