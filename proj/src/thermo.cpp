#include "thermchan/thermo.hpp"

#include <cmath>
#include <limits>

#include "thermchan/errors.hpp"

namespace thermchan::thermo {

bool EffectiveTemperature::infinite() const { return std::isinf(kelvin); }

EffectiveTemperature effective_temperature(double p_e, double omega_q, double hbar_over_kb) {
  if (!(omega_q > 0.0)) throw DomainError("effective temperature needs omega_q > 0");
  if (!(p_e >= 0.0 && p_e < 1.0)) throw DomainError("p_e must lie in [0, 1)");
  if (p_e > 0.5) throw NegativeTemperatureError(p_e);
  EffectiveTemperature out{0.0, p_e, omega_q};
  if (p_e == 0.0) return out;
  if (p_e == 0.5) {
    out.kelvin = std::numeric_limits<double>::infinity();
    return out;
  }
  // ln((1 - p) / p) = log1p((1 - 2p) / p)
  out.kelvin = hbar_over_kb * omega_q / std::log1p((1.0 - 2.0 * p_e) / p_e);
  return out;
}

double population_from_temperature(double t, double omega_q, double hbar_over_kb) {
  if (!(t >= 0.0)) throw DomainError("temperature must be non-negative");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 0.5;
  return 1.0 / (1.0 + std::exp(hbar_over_kb * omega_q / t));
}

StageSplit detect_stages(const evolve::EvolutionResult& result, double p_ss) {
  return detect_stages(result.times, result.p_e, p_ss);
}

StageSplit detect_stages(std::span<const double> times, std::span<const double> p_e, double p_ss) {
  if (times.empty() || times.size() != p_e.size()) throw ContractError("stage detection needs a non-empty trace");
  if (!(p_ss > 0.0 && p_ss < 1.0)) throw ContractError("steady-state population must lie in (0, 1)");
  const double band = std::max(0.05 * p_ss, 0.005);
  const double final_residual = std::abs(p_e.back() - p_ss);
  if (final_residual > band) throw NoConvergenceError("trace never settles into the steady-state band", final_residual);
  std::size_t i = p_e.size() - 1;
  while (i > 0 && std::abs(p_e[i - 1] - p_ss) <= band) --i;
  return {times[i], i, times.front(), times.back()};
}

}  // namespace thermchan::thermo
