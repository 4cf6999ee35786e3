#include "thermchan/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "thermchan/engines.hpp"
#include "thermchan/errors.hpp"
#include "thermchan/thermo.hpp"
#include "thermchan/units.hpp"

namespace thermchan::expcli {

using nlohmann::ordered_json;

std::optional<double> gibbs_temperature(double p_e, double omega_q, double hbar_over_kb) {
  // Round-off below zero is still the zero-temperature point.
  const double p = (p_e < 0.0 && p_e > -1e-9) ? 0.0 : p_e;
  if (!(p >= 0.0 && p <= 0.5)) return std::nullopt;
  return thermo::effective_temperature(p, omega_q, hbar_over_kb).kelvin;
}

RabiAnalysis analyze_rabi(const std::vector<double>& t, const std::vector<double>& p_e, double window) {
  RabiAnalysis a;
  std::size_t end = 0;
  while (end < t.size() && t[end] <= window) ++end;
  if (end < 3) return a;
  double lo = p_e[0], hi = p_e[0], area = 0.0;
  for (std::size_t i = 1; i < end; ++i) {
    lo = std::min(lo, p_e[i]);
    hi = std::max(hi, p_e[i]);
    area += 0.5 * (p_e[i] + p_e[i - 1]) * (t[i] - t[i - 1]);
  }
  a.center = 0.5 * (lo + hi);
  a.mean = area / (t[end - 1] - t[0]);
  for (std::size_t i = 1; i + 1 < end; ++i) {
    if (p_e[i] > p_e[i - 1] && p_e[i] >= p_e[i + 1]) {
      const double den = p_e[i - 1] - 2.0 * p_e[i] + p_e[i + 1];
      const double h = 0.5 * (t[i + 1] - t[i - 1]);
      const double shift = den != 0.0 ? 0.5 * (p_e[i - 1] - p_e[i + 1]) / den : 0.0;
      a.maxima_times.push_back(t[i] + shift * h);
    }
  }
  if (a.maxima_times.size() >= 2) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < a.maxima_times.size(); ++i) gaps.push_back(a.maxima_times[i] - a.maxima_times[i - 1]);
    double sum = 0.0;
    for (double g : gaps) sum += g;
    a.mean_spacing = sum / static_cast<double>(gaps.size());
    for (double g : gaps) a.max_spacing_deviation = std::max(a.max_spacing_deviation, std::abs(g - a.mean_spacing) / a.mean_spacing);
  }
  return a;
}

namespace {

SeriesResult from_evolution(std::string label, const evolve::EvolutionResult& r, double Omega) {
  SeriesResult s;
  s.label = std::move(label);
  s.engine = "full";
  s.Omega = Omega;
  s.t = r.times;
  s.p_e = r.p_e;
  s.trace_err_max = r.trace_err_max;
  s.herm_err_max = r.herm_err_max;
  s.min_eig_min = r.min_eig_min;
  s.extra["steps_taken"] = r.steps_taken;
  s.extra["steps_rejected"] = r.steps_rejected;
  return s;
}

SeriesResult from_channel(std::string label, const ChannelRun& r, double Omega) {
  SeriesResult s;
  s.label = std::move(label);
  s.engine = "channel";
  s.Omega = Omega;
  s.t = r.times;
  s.p_e = r.p_e;
  s.trace_err_max = r.trace_err_max;
  s.herm_err_max = r.herm_err_max;
  s.min_eig_min = r.min_eig_min;
  ordered_json energies = ordered_json::array(), detunings = ordered_json::array();
  for (int k = 0; k < 3; ++k) {
    energies.push_back(units::to_mhz(r.basis.energies(k)));
    detunings.push_back(units::to_mhz(r.basis.detunings(k)));
  }
  ordered_json rates = ordered_json::array();
  for (int k = 0; k < 3; ++k) {
    ordered_json row = ordered_json::array();
    for (int n = 0; n < 3; ++n) row.push_back(r.rates.gamma(k, n));
    rates.push_back(row);
  }
  s.extra["channel_energies_mhz"] = energies;
  s.extra["channel_detunings_mhz"] = detunings;
  s.extra["channel_rates_per_us"] = rates;
  s.extra["formula_p_e_ss"] = r.formula_p_e;
  s.extra["rate_matrix_p_e_ss"] = r.rate_p_e;
  s.extra["formula_minus_rate_matrix"] = r.formula_p_e - r.rate_p_e;
  s.extra["near_singular"] = r.basis.near_singular;
  s.extra["expm_fallback"] = r.expm_fallback;
  return s;
}

void attach_steady(SeriesResult& s, double p_ss, const ScenarioConfig& c) {
  s.p_ss = p_ss;
  s.t_eff = gibbs_temperature(p_ss, c.teff_reference(), c.params.hbar_over_kb);
  if (p_ss > 0.0 && p_ss < 1.0) {
    try {
      s.t_boundary = thermo::detect_stages(s.t, s.p_e, p_ss).t_boundary;
    } catch (const NoConvergenceError& e) {
      s.extra["stage_detection"] = e.what();
    }
  }
}

SeriesResult full_series(const std::string& label, const model::SystemParams& p, std::span<const double> grid,
                         const ScenarioConfig& c, bool with_steady) {
  auto s = from_evolution(label, run_full(p, grid, c.tol), p.Omega);
  if (with_steady) {
    const auto ss = steady_full(p);
    s.extra["steady_state_residual"] = ss.state.residual;
    s.extra["steady_state_clipped"] = ss.state.clipped;
    s.extra["steady_state_sigma_min"] = ss.state.sigma_min;
    s.extra["steady_state_sigma_second"] = ss.state.sigma_second;
    attach_steady(s, ss.p_e, c);
  }
  return s;
}

SeriesResult channel_series(const std::string& label, const model::SystemParams& p, std::span<const double> grid,
                            const ScenarioConfig& c) {
  const auto r = run_channel(p, grid);
  auto s = from_channel(label, r, p.Omega);
  attach_steady(s, r.formula_p_e, c);
  return s;
}

bool wants_full(Engine e) { return e != Engine::channel; }
bool wants_channel(Engine e) { return e != Engine::full; }

void run_rabi(const ScenarioConfig& c, ScenarioResult& out) {
  const auto grid = linear_grid(c.t_max, c.samples);
  auto s = from_evolution("bare_qubit", run_bare_qubit(c.params, grid, c.tol), c.params.Omega);
  const double window = std::min(0.5, c.t_max);
  const auto a = analyze_rabi(s.t, s.p_e, window);
  ordered_json r;
  r["window_us"] = window;
  r["expected_period_us"] = std::numbers::pi / std::hypot(c.params.Omega, 0.5 * c.params.delta_q());
  r["measured_period_us"] = a.mean_spacing;
  r["max_spacing_deviation"] = a.max_spacing_deviation;
  r["oscillation_center"] = a.center;
  r["time_average"] = a.mean;
  r["maxima_us"] = a.maxima_times;
  r["convention"] = "H = (delta_q/2) sigma_z + Omega (sigma_+ + sigma_-); resonant P_e = sin^2(Omega t)";
  out.results["rabi"] = r;
  out.series.push_back(std::move(s));
}

void run_thermalize(const ScenarioConfig& c, ScenarioResult& out, const std::string& tag) {
  const auto grid = linear_grid(c.t_max, c.samples);
  if (wants_full(c.engine)) out.series.push_back(full_series(tag + "_full", c.params, grid, c, true));
  if (wants_channel(c.engine)) out.series.push_back(channel_series(tag + "_channel", c.params, grid, c));
}

void run_power_series(const ScenarioConfig& c, ScenarioResult& out) {
  const auto grid = log_grid(c.t_min, c.t_max, c.samples);
  for (double om : c.power_series_Omegas) {
    auto p = c.params;
    p.Omega = om;
    char label[64];
    std::snprintf(label, sizeof(label), "Omega_%gMHz", units::to_mhz(om));
    if (wants_full(c.engine)) out.series.push_back(full_series(std::string(label) + "_full", p, grid, c, true));
    if (wants_channel(c.engine)) out.series.push_back(channel_series(std::string(label) + "_channel", p, grid, c));
  }
  // Ordering of the steady inversions across drive strengths.
  for (const char* engine : {"full", "channel"}) {
    std::vector<double> ps;
    for (const auto& s : out.series) {
      if (s.engine == engine && s.p_ss) ps.push_back(*s.p_ss);
    }
    if (ps.empty()) continue;
    bool increasing = true;
    for (std::size_t i = 1; i < ps.size(); ++i) increasing = increasing && ps[i] > ps[i - 1];
    out.results[std::string("p_ss_strictly_increasing_") + engine] = increasing;
  }
}

void run_channel_compare(const ScenarioConfig& c, ScenarioResult& out) {
  auto cc = c;
  cc.engine = Engine::both;
  run_thermalize(cc, out, "compare");
  const auto& full = out.series[0];
  const auto& chan = out.series[1];
  double dev = 0.0, t_at = 0.0;
  for (std::size_t i = 0; i < full.p_e.size(); ++i) {
    const double d = std::abs(full.p_e[i] - chan.p_e[i]);
    if (d > dev) {
      dev = d;
      t_at = full.t[i];
    }
  }
  out.results["max_abs_deviation"] = dev;
  out.results["max_deviation_t_us"] = t_at;
  if (full.p_ss && chan.p_ss) out.results["steady_state_difference"] = *full.p_ss - *chan.p_ss;
}

void run_fit(const ScenarioConfig& c, ScenarioResult& out) {
  if (c.fit_data.empty()) throw ParseError("fit_data", "fit scenario needs a trace file");
  out.fit_data = read_trace_csv(c.fit_data);
  out.fit = fit_trace(out.fit_data, c.fit_free, c);
  std::vector<double> grid{0.0};
  for (const auto& pt : out.fit_data) {
    if (pt.t_us > grid.back()) grid.push_back(pt.t_us);
  }
  const auto r = c.scenario == Scenario::rabi ? run_bare_qubit(out.fit->params, grid, c.tol)
                                              : run_full(out.fit->params, grid, c.tol);
  out.series.push_back(from_evolution("fitted_model", r, out.fit->params.Omega));
  ordered_json f;
  for (const auto& v : out.fit->fitted) f[v.name + "_" + (v.unit == "us" ? "us" : "mhz")] = v.display;
  ordered_json r2;
  r2["fitted"] = f;
  r2["residual_rms"] = out.fit->residual;
  r2["iterations"] = out.fit->iterations;
  r2["converged"] = out.fit->converged;
  out.results["fit"] = r2;
}

}  // namespace

std::vector<SweepPoint> sweep_full(const ScenarioConfig& c, unsigned threads) {
  const auto omegas = c.sweep.Omega_values();
  const std::size_t nd = c.sweep.omega_d.n, no = omegas.size();
  std::vector<SweepPoint> pts(nd * no);
  std::vector<std::exception_ptr> errors(pts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      try {
        auto p = c.params;
        p.omega_d = c.sweep.omega_d.at(i / no);
        p.Omega = omegas[i % no];
        const auto ss = steady_full(p);
        const auto ph = ss.state.rho.physicality();
        pts[i] = {p.omega_d, p.Omega, ss.p_e, gibbs_temperature(ss.p_e, c.teff_reference(), p.hbar_over_kb),
                  ph.trace_error, ph.hermiticity_error, ph.min_eigenvalue, ss.state.residual};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pts.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return pts;
}

std::vector<SweepPoint> sweep_channel(const ScenarioConfig& c) {
  const auto omegas = c.sweep.Omega_values();
  std::vector<SweepPoint> pts;
  for (std::size_t i = 0; i < c.sweep.omega_d.n; ++i) {
    for (double om : omegas) {
      auto p = c.params;
      p.omega_d = c.sweep.omega_d.at(i);
      p.Omega = om;
      const auto b = channel::channel_states(p);
      const auto g = channel::channel_rates(b, model::bath_from(p), p);
      const double pe = channel::steady_state_formula(b.energies, b.detunings, p.eta, p.Omega);
      pts.push_back({p.omega_d, p.Omega, pe, gibbs_temperature(pe, c.teff_reference(), p.hbar_over_kb), 0.0, 0.0,
                     0.0, channel::rate_steady_p_e(b, g)});
    }
  }
  return pts;
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
  validate(c);
  ScenarioResult out;
  out.config = c;
  switch (c.scenario) {
    case Scenario::rabi:
      run_rabi(c, out);
      break;
    case Scenario::thermalize:
      run_thermalize(c, out, "thermalize");
      break;
    case Scenario::power_series:
      run_power_series(c, out);
      break;
    case Scenario::sweep:
      if (wants_full(c.engine)) out.sweep_full = sweep_full(c);
      if (wants_channel(c.engine)) out.sweep_channel = sweep_channel(c);
      break;
    case Scenario::channel_compare:
      run_channel_compare(c, out);
      break;
    case Scenario::fit:
      run_fit(c, out);
      break;
  }

  double trace_err = 0.0, herm_err = 0.0, min_eig = std::numeric_limits<double>::infinity();
  std::size_t negative_temperature = 0;
  for (const auto& s : out.series) {
    trace_err = std::max(trace_err, s.trace_err_max);
    herm_err = std::max(herm_err, s.herm_err_max);
    min_eig = std::min(min_eig, s.min_eig_min);
    if (s.p_ss && !s.t_eff) ++negative_temperature;
  }
  for (const auto* grid : {&out.sweep_full, &out.sweep_channel}) {
    for (const auto& pt : *grid) {
      if (grid == &out.sweep_full) {
        trace_err = std::max(trace_err, pt.trace_err);
        herm_err = std::max(herm_err, pt.herm_err);
        min_eig = std::min(min_eig, pt.min_eig);
      }
      if (!pt.t_eff) ++negative_temperature;
    }
  }
  out.diagnostics["trace_err_max"] = trace_err;
  out.diagnostics["herm_err_max"] = herm_err;
  if (std::isfinite(min_eig)) out.diagnostics["min_eig_min"] = min_eig;
  out.diagnostics["negative_temperature_points"] = negative_temperature;
  return out;
}

}  // namespace thermchan::expcli
