#pragma once

#include <span>
#include <vector>

#include "thermchan/channel.hpp"
#include "thermchan/evolve.hpp"
#include "thermchan/model.hpp"

namespace thermchan::expcli {

// Full driven JC model in the drive frame, starting from |g,0><g,0|.
evolve::EvolutionResult run_full(const model::SystemParams& p, std::span<const double> t_grid, double tol);

// Bare driven qubit (2x2) with T1 decay, starting from |g><g|.
evolve::EvolutionResult run_bare_qubit(const model::SystemParams& p, std::span<const double> t_grid, double tol);

struct FullSteady {
  double p_e = 0.0;
  evolve::SteadyState state;
};
FullSteady steady_full(const model::SystemParams& p);

struct ChannelRun {
  channel::ChannelBasis basis;
  channel::ChannelRates rates;
  std::vector<double> times;
  std::vector<double> p_e;
  double formula_p_e = 0.0;  // closed-form steady inversion
  double rate_p_e = 0.0;     // from the null vector of the rate matrix
  bool expm_fallback = false;
  double trace_err_max = 0.0;
  double herm_err_max = 0.0;
  double min_eig_min = 0.0;
};
ChannelRun run_channel(const model::SystemParams& p, std::span<const double> t_grid);

std::vector<double> linear_grid(double t_max, std::size_t samples);
// 0 followed by samples-1 log-spaced points from t_min to t_max.
std::vector<double> log_grid(double t_min, double t_max, std::size_t samples);

}  // namespace thermchan::expcli
