#pragma once

#include "thermchan/evolve.hpp"
#include "thermchan/units.hpp"

namespace thermchan::thermo {

// Two-level Gibbs temperature reproducing a given inversion.
struct EffectiveTemperature {
  double kelvin = 0.0;  // +infinity at p_e = 1/2
  double p_e = 0.0;
  double omega_q = 0.0;

  bool infinite() const;
};

// Throws NegativeTemperatureError for p_e > 1/2 and DomainError outside [0, 1).
EffectiveTemperature effective_temperature(double p_e, double omega_q, double hbar_over_kb = units::kHbarOverKb);

double population_from_temperature(double t, double omega_q, double hbar_over_kb = units::kHbarOverKb);

struct StageSplit {
  double t_boundary = 0.0;
  std::size_t boundary_index = 0;
  // Endothermic window [t_first, t_boundary), quasi-equilibrium [t_boundary, t_last].
  double t_first = 0.0;
  double t_last = 0.0;
};

// Earliest sample after which |P_e - p_ss| <= max(0.05 p_ss, 0.005) holds for
// every later sample. Throws NoConvergenceError when the tail never settles.
StageSplit detect_stages(const evolve::EvolutionResult& result, double p_ss);
StageSplit detect_stages(std::span<const double> times, std::span<const double> p_e, double p_ss);

}  // namespace thermchan::thermo
