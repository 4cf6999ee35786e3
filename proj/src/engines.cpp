#include "thermchan/engines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermchan/errors.hpp"

namespace thermchan::expcli {

evolve::EvolutionResult run_full(const model::SystemParams& p, std::span<const double> t_grid, double tol) {
  const auto h = model::build_h_rotating(p);
  const auto c = model::collapse_set_full(p);
  const auto rho0 = DensityMatrix::basis_state(h.side(), p.dims().index(qop::kGround, 0));
  evolve::EvolveOptions o;
  o.tol = tol;
  return evolve::evolve_adaptive(h, c, rho0, t_grid, o);
}

evolve::EvolutionResult run_bare_qubit(const model::SystemParams& p, std::span<const double> t_grid, double tol) {
  const auto h = model::build_h_bare_qubit(p);
  const auto c = model::collapse_set_bare_qubit(p);
  evolve::EvolveOptions o;
  o.tol = tol;
  return evolve::evolve_adaptive(h, c, DensityMatrix::basis_state(2, qop::kGround), t_grid, o);
}

FullSteady steady_full(const model::SystemParams& p) {
  const auto h = model::build_h_rotating(p);
  const auto l = evolve::build_liouvillian(h, model::collapse_set_full(p));
  auto ss = evolve::steady_state(l);
  const double pe = evolve::population(model::excited_projector(p.dims()), ss.rho);
  return {pe, std::move(ss)};
}

ChannelRun run_channel(const model::SystemParams& p, std::span<const double> t_grid) {
  ChannelRun r;
  r.basis = channel::channel_states(p);
  r.rates = channel::channel_rates(r.basis, model::bath_from(p), p);
  r.formula_p_e = channel::steady_state_formula(r.basis.energies, r.basis.detunings, p.eta, p.Omega);
  r.rate_p_e = channel::rate_steady_p_e(r.basis, r.rates);
  const auto rho0 = channel::ground_state_in_channel_basis(r.basis);
  const auto ev = channel::evolve_channel(r.basis, r.rates, rho0, t_grid);
  r.expm_fallback = ev.expm_fallback;
  r.times.assign(t_grid.begin(), t_grid.end());
  r.min_eig_min = std::numeric_limits<double>::infinity();
  for (const auto& s : ev.states) {
    r.p_e.push_back(channel::qubit_population_channel(s, r.basis));
    const auto ph = s.physicality();
    r.trace_err_max = std::max(r.trace_err_max, ph.trace_error);
    r.herm_err_max = std::max(r.herm_err_max, ph.hermiticity_error);
    r.min_eig_min = std::min(r.min_eig_min, ph.min_eigenvalue);
  }
  return r;
}

std::vector<double> linear_grid(double t_max, std::size_t samples) {
  if (samples < 2 || !(t_max > 0.0)) throw ContractError("grid needs t_max > 0 and at least 2 samples");
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) t[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
  t.back() = t_max;
  return t;
}

std::vector<double> log_grid(double t_min, double t_max, std::size_t samples) {
  if (samples < 3 || !(t_min > 0.0) || !(t_max > t_min)) {
    throw ContractError("log grid needs 0 < t_min < t_max and at least 3 samples");
  }
  std::vector<double> t(samples);
  t[0] = 0.0;
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t i = 1; i < samples; ++i) {
    t[i] = std::exp(a + (b - a) * static_cast<double>(i - 1) / static_cast<double>(samples - 2));
  }
  t[1] = t_min;
  t.back() = t_max;
  return t;
}

}  // namespace thermchan::expcli
