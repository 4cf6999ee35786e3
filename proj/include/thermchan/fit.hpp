#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thermchan/config.hpp"

namespace thermchan::expcli {

struct TracePoint {
  double t_us;
  double p_e;
};

struct FittedValue {
  std::string name;
  double value;       // internal units
  double display;     // MHz for frequencies, us for t1
  std::string unit;
};

struct FitResult {
  std::vector<FittedValue> fitted;
  double residual = 0.0;  // RMS of P_e differences
  std::size_t iterations = 0;
  bool converged = true;
  model::SystemParams params;  // config params with the fitted values applied
};

// Minimizes the RMS P_e residual over the free parameters (subset of eta, Omega,
// t1, gamma_r), each bounded to [0.1x, 10x] of its configured value. The model
// is the bare qubit for the rabi scenario and the full JC model otherwise.
FitResult fit_trace(std::span<const TracePoint> data, const std::vector<std::string>& free, const ScenarioConfig& c);

// "t_us,p_e[,...]" CSV with a header line.
std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path);

}  // namespace thermchan::expcli
