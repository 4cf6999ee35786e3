#include "thermchan/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include "thermchan/errors.hpp"
#include "thermchan/evolve.hpp"

namespace thermchan::channel {

using qop::CMatrix;
using qop::Complex;

namespace {

double floored(double x) {
  if (std::abs(x) >= kEpsFloor) return x;
  return x < 0.0 ? -kEpsFloor : kEpsFloor;
}

}  // namespace

double ChannelBasis::energy(int k) const { return floored(energies(k)); }
double ChannelBasis::detuning(int k) const { return floored(detunings(k)); }

double ChannelRates::outflow(int k) const {
  double s = 0.0;
  for (int n = 0; n < 3; ++n) {
    if (n != k) s += gamma(k, n);
  }
  return s;
}

Eigen::Matrix3d ChannelRates::transition_matrix() const {
  Eigen::Matrix3d m = gamma.transpose();
  for (int k = 0; k < 3; ++k) m(k, k) = -outflow(k);
  return m;
}

ChannelBasis channel_states(const model::SystemParams& p) {
  if (p.fock_dim < 2) throw DimensionError("channel states need at least two Fock levels");
  const auto h = model::build_h_rotating(p);
  const auto dims = p.dims();
  const std::array<std::size_t, 3> idx{dims.index(qop::kGround, 0), dims.index(qop::kExcited, 0),
                                       dims.index(qop::kGround, 1)};
  CMatrix block(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) block(i, j) = h.matrix()(idx[i], idx[j]);
  }

  ChannelBasis b;
  b.h_trunc = block;
  b.reference_shift = -block(kG0, kG0).real();
  const auto eig = qop::herm_eig(block);

  std::array<int, 3> order{0, 1, 2};
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::sort(order.begin(), order.end(), [&](int a, int c) {
    if (std::abs(eig.values(a) - eig.values(c)) > 1e-12 * scale) return eig.values(a) < eig.values(c);
    return std::norm(eig.vectors(kG0, a)) > std::norm(eig.vectors(kG0, c));
  });

  b.states.resize(3, 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3cd v = eig.vectors.col(order[k]);
    // Fix the global phase: first non-negligible component real positive.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        v *= std::conj(v(i)) / std::abs(v(i));
        break;
      }
    }
    b.states.col(k) = v;
    b.energies(k) = eig.values(order[k]) + b.reference_shift;
    b.detunings(k) = b.energies(k) - p.delta_q();
  }
  for (int k = 0; k < 3; ++k) {
    if (std::abs(b.energies(k)) < kEpsFloor || std::abs(b.detunings(k)) < kEpsFloor) b.near_singular = true;
  }
  return b;
}

ChannelRates channel_rates(const ChannelBasis& b, const model::BathSpectrum& s, const model::SystemParams& p) {
  ChannelRates r;
  const double eta = p.eta;
  const double om = p.Omega;
  auto weight = [&](int k) {
    const double dk = b.detuning(k), ek = b.energy(k);
    return 1.0 + eta * eta / (dk * dk) + om * om / (ek * ek);
  };
  for (int k = 0; k < 3; ++k) {
    for (int n = 0; n < 3; ++n) {
      if (k == n) continue;
      const double ek = b.energy(k), en = b.energy(n);
      const double bath = model::rate_thermal(s, en - ek) + model::rate_thermal(s, ek - en) + model::rate_vacuum(s, ek - en);
      const double mix = eta * (1.0 / b.detuning(k) + 1.0 / b.detuning(n)) + om * (1.0 / ek + 1.0 / en);
      r.gamma(k, n) = bath * mix * mix / (weight(k) * weight(n));
    }
  }
  return r;
}

ChannelGenerator channel_generator(const Eigen::Vector3d& energies, const ChannelRates& g) {
  CMatrix h = CMatrix::Zero(3, 3);
  for (int k = 0; k < 3; ++k) h(k, k) = energies(k);
  model::CollapseSet c;
  for (int k = 0; k < 3; ++k) {
    for (int n = 0; n < 3; ++n) {
      if (k != n && g.gamma(k, n) > 0.0) c.push_back({qop::outer(3, n, k), g.gamma(k, n)});
    }
  }
  return {qop::Operator(std::move(h)), std::move(c)};
}

ChannelEvolution evolve_channel(const ChannelBasis& b, const ChannelRates& g, const DensityMatrix& rho0,
                                std::span<const double> t_grid) {
  if (rho0.dim() != 3) throw DimensionError("channel state must be 3x3");
  ChannelEvolution out;
  out.states.reserve(t_grid.size());

  const Eigen::Matrix3d m = g.transition_matrix();
  Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  const Eigen::Matrix3cd v = es.eigenvectors();
  const Eigen::Vector3cd lambda = es.eigenvalues();
  Eigen::JacobiSVD<Eigen::Matrix3cd> svd(v);
  const auto& sv = svd.singularValues();
  out.expm_fallback = es.info() != Eigen::Success || !(sv(2) > 1e-10 * sv(0));
  Eigen::Matrix3cd vinv;
  if (!out.expm_fallback) vinv = v.inverse();

  Eigen::Vector3cd p0;
  for (int k = 0; k < 3; ++k) p0(k) = rho0.matrix()(k, k);

  for (const double t : t_grid) {
    CMatrix rho(3, 3);
    Eigen::Vector3cd pt;
    if (out.expm_fallback) {
      pt = evolve::expm(CMatrix(m.cast<Complex>() * t)) * p0;
    } else {
      Eigen::Vector3cd ex;
      for (int k = 0; k < 3; ++k) ex(k) = std::exp(lambda(k) * t);
      pt = v * ex.asDiagonal() * vinv * p0;
    }
    for (int j = 0; j < 3; ++j) {
      rho(j, j) = pt(j).real();
      for (int k = 0; k < 3; ++k) {
        if (j == k) continue;
        const Complex rate(-0.5 * (g.outflow(j) + g.outflow(k)), -(b.energies(j) - b.energies(k)));
        rho(j, k) = rho0.matrix()(j, k) * std::exp(rate * t);
      }
    }
    out.states.push_back(DensityMatrix::unchecked(std::move(rho)));
  }
  return out;
}

double steady_state_formula(const Eigen::Vector3d& energies, const Eigen::Vector3d& detunings, double eta,
                            double Omega) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double e = floored(energies(k));
    const double d = floored(detunings(k));
    sum += Omega * Omega / (Omega * Omega + e * e * (1.0 + eta * eta / (d * d)));
  }
  return sum / 3.0;
}

ChannelSteady steady_state_channel(const model::SystemParams& p) {
  const auto b = channel_states(p);
  return {steady_state_formula(b.energies, b.detunings, p.eta, p.Omega), b.near_singular};
}

Eigen::Vector3d rate_steady_populations(const ChannelRates& g) {
  const Eigen::Matrix3d m = g.transition_matrix();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
  Eigen::Vector3d p = svd.matrixV().col(2);
  const double total = p.sum();
  if (total == 0.0) throw DegenerateKernelError(svd.singularValues()(2), svd.singularValues()(1));
  p /= total;
  return p;
}

double rate_steady_p_e(const ChannelBasis& b, const ChannelRates& g) {
  const Eigen::Vector3d p = rate_steady_populations(g);
  double pe = 0.0;
  for (int k = 0; k < 3; ++k) pe += p(k) * std::norm(b.states(kE0, k));
  return pe;
}

double qubit_population_channel(const DensityMatrix& rho, const ChannelBasis& b) {
  if (rho.dim() != 3) throw DimensionError("channel state must be 3x3");
  const Eigen::Vector3cd e0 = b.states.row(kE0).adjoint();  // <mu_k|e,0>
  // P in the mu basis: P_jk = <mu_j|e,0><e,0|mu_k>.
  const CMatrix proj = e0 * e0.adjoint();
  return (rho.matrix() * proj).trace().real();
}

DensityMatrix ground_state_in_channel_basis(const ChannelBasis& b) {
  const Eigen::Vector3cd c = b.states.row(kG0).adjoint();  // <mu_k|g,0>
  return DensityMatrix(c * c.adjoint());
}

}  // namespace thermchan::channel
