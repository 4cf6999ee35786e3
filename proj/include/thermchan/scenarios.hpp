#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "thermchan/config.hpp"
#include "thermchan/fit.hpp"

namespace thermchan::expcli {

// One P_e(t) curve with its physicality record and, when available, the
// steady state it approaches.
struct SeriesResult {
  std::string label;
  std::string engine;  // "full" or "channel"
  double Omega = 0.0;  // rad/us
  std::vector<double> t;
  std::vector<double> p_e;
  double trace_err_max = 0.0;
  double herm_err_max = 0.0;
  double min_eig_min = 0.0;
  std::optional<double> p_ss;
  std::optional<double> t_eff;  // K, may be +inf; empty when p_ss > 1/2
  std::optional<double> t_boundary;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct SweepPoint {
  double omega_d = 0.0;  // rad/us
  double Omega = 0.0;    // rad/us
  double p_e_ss = 0.0;
  std::optional<double> t_eff;  // K, may be +inf; empty outside the Gibbs domain
  double trace_err = 0.0;
  double herm_err = 0.0;
  double min_eig = 0.0;
  double aux = 0.0;  // channel engine: rate-matrix P_e; full engine: steady-state residual
};

struct RabiAnalysis {
  std::vector<double> maxima_times;  // parabolic-refined local maxima
  double mean_spacing = 0.0;
  double max_spacing_deviation = 0.0;  // max |spacing - mean| / mean
  double center = 0.0;                 // (max + min) / 2 over the window
  double mean = 0.0;                   // time average over the window
};
RabiAnalysis analyze_rabi(const std::vector<double>& t, const std::vector<double>& p_e, double window);

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<SeriesResult> series;
  std::vector<SweepPoint> sweep_full;
  std::vector<SweepPoint> sweep_channel;
  std::optional<FitResult> fit;
  std::vector<TracePoint> fit_data;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

// Runs the configured scenario in memory. Engine failures propagate.
ScenarioResult run_scenario(const ScenarioConfig& c);

// Steady-state grid over (omega_d, Omega), evaluated in parallel; row order is
// omega_d-major, deterministic regardless of thread scheduling.
std::vector<SweepPoint> sweep_full(const ScenarioConfig& c, unsigned threads = 0);
std::vector<SweepPoint> sweep_channel(const ScenarioConfig& c);

// Gibbs temperature or empty outside [0, 1/2].
std::optional<double> gibbs_temperature(double p_e, double omega_q, double hbar_over_kb);

}  // namespace thermchan::expcli
