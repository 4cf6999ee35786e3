#include "thermchan/model.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "thermchan/errors.hpp"

namespace thermchan::model {

using qop::Operator;
using qop::Pauli;

void SystemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be strictly positive");
  };
  positive(omega_q, "omega_q");
  positive(omega_r, "omega_r");
  positive(omega_d, "omega_d");
  positive(eta, "eta");
  positive(Omega, "Omega");
  positive(gamma_r, "gamma_r");
  positive(t1, "t1");
  positive(hbar_over_kb, "hbar_over_kb");
  if (!(t_bath >= 0.0)) throw DomainError("t_bath must be non-negative");
  if (!(dephasing_rate >= 0.0)) throw DomainError("dephasing_rate must be non-negative");
  if (fock_dim < 3) throw DomainError("fock_dim must be at least 3");
}

BathSpectrum bath_from(const SystemParams& p) { return {p.gamma_r, p.t_bath, p.hbar_over_kb}; }

namespace {

struct Ladder {
  Operator sz, sp, sm, a, ad, n;
};

Ladder composite_ops(std::size_t fock_dim) {
  const auto iq = qop::identity(2);
  const auto ir = qop::identity(fock_dim);
  const auto a = qop::annihilation(fock_dim);
  return {qop::kron(qop::pauli(Pauli::z), ir),     qop::kron(qop::pauli(Pauli::plus), ir),
          qop::kron(qop::pauli(Pauli::minus), ir), qop::kron(iq, a),
          qop::kron(iq, qop::dagger(a)),           qop::kron(iq, qop::number(fock_dim))};
}

}  // namespace

Operator build_h_lab(const SystemParams& p, double t) {
  const auto o = composite_ops(p.fock_dim);
  const std::complex<double> phase = std::polar(1.0, -p.omega_d * t);
  return 0.5 * p.omega_q * o.sz + p.omega_r * o.n + p.eta * (o.ad * o.sm + o.a * o.sp) +
         p.Omega * (phase * o.ad + std::conj(phase) * o.a);
}

Operator build_h_rotating(const SystemParams& p) {
  const auto o = composite_ops(p.fock_dim);
  return 0.5 * p.delta_q() * o.sz + p.delta_r() * o.n + p.eta * (o.ad * o.sm + o.a * o.sp) + p.Omega * (o.ad + o.a);
}

Operator build_h_bare_qubit(const SystemParams& p) {
  return 0.5 * p.delta_q() * qop::pauli(Pauli::z) + p.Omega * (qop::pauli(Pauli::plus) + qop::pauli(Pauli::minus));
}

double bose_occupation(double omega, double t, double hbar_over_kb) {
  if (!(omega > 0.0)) throw DomainError("bose_occupation needs omega > 0");
  if (t <= 0.0) return 0.0;
  return 1.0 / std::expm1(hbar_over_kb * omega / t);
}

double rate_thermal(const BathSpectrum& s, double omega) {
  const double w = std::max(std::abs(omega), kOmegaFloor);
  return s.kappa * bose_occupation(w, s.t_bath, s.hbar_over_kb);
}

double rate_vacuum(const BathSpectrum& s, double omega) { return omega > 0.0 ? s.kappa : 0.0; }

CollapseSet collapse_set_full(const SystemParams& p) {
  const auto o = composite_ops(p.fock_dim);
  const double nr = bose_occupation(p.omega_r, p.t_bath, p.hbar_over_kb);
  CollapseSet set{{o.a, p.gamma_r * (nr + 1.0)}, {o.ad, p.gamma_r * nr}, {o.sm, 1.0 / p.t1}};
  if (p.qubit_thermal) {
    set.push_back({o.sp, bose_occupation(p.omega_q, p.t_bath, p.hbar_over_kb) / p.t1});
  }
  // L = sqrt(gamma_phi/2) sigma_z gives off-diagonal decay at gamma_phi.
  if (p.dephasing_rate > 0.0) set.push_back({o.sz, 0.5 * p.dephasing_rate});
  return set;
}

CollapseSet collapse_set_bare_qubit(const SystemParams& p) {
  CollapseSet set{{qop::pauli(Pauli::minus), 1.0 / p.t1}};
  if (p.qubit_thermal) {
    set.push_back({qop::pauli(Pauli::plus), bose_occupation(p.omega_q, p.t_bath, p.hbar_over_kb) / p.t1});
  }
  if (p.dephasing_rate > 0.0) set.push_back({qop::pauli(Pauli::z), 0.5 * p.dephasing_rate});
  return set;
}

Operator excited_projector(const qop::HilbertDims& dims) {
  const auto pe = qop::outer(dims.qubit_dim, qop::kExcited, qop::kExcited);
  if (dims.fock_dim <= 1) return pe;
  return qop::kron(pe, qop::identity(dims.fock_dim));
}

}  // namespace thermchan::model
