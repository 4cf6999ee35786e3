#include "thermchan/output.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "thermchan/errors.hpp"
#include "thermchan/units.hpp"

namespace thermchan::expcli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

namespace {

// Populations are emitted in [0, 1]; only round-off is ever outside.
double emitted_population(double p) { return std::clamp(p, 0.0, 1.0); }

std::string temperature_mk(const std::optional<double>& t_eff) {
  if (!t_eff) return "nan";
  return format_number(*t_eff * 1e3);
}

ordered_json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json json_temperature(const std::optional<double>& t_eff) {
  if (!t_eff) return nullptr;
  return json_number(*t_eff * 1e3);
}

ordered_json series_json(const SeriesResult& s) {
  ordered_json j;
  j["label"] = s.label;
  j["engine"] = s.engine;
  j["Omega_mhz"] = units::to_mhz(s.Omega);
  j["p_e_ss"] = s.p_ss ? json_number(*s.p_ss) : nullptr;
  j["t_eff_mk"] = json_temperature(s.t_eff);
  j["stage_boundary_us"] = s.t_boundary ? ordered_json(*s.t_boundary) : nullptr;
  j["trace_err_max"] = s.trace_err_max;
  j["herm_err_max"] = s.herm_err_max;
  j["min_eig_min"] = s.min_eig_min;
  for (const auto& [k, v] : s.extra.items()) j[k] = v;
  auto p = ordered_json::array();
  for (double x : s.p_e) p.push_back(emitted_population(x));
  j["t_us"] = s.t;
  j["p_e"] = p;
  return j;
}

ordered_json grid_json(const std::vector<SweepPoint>& grid, const char* aux_name) {
  auto rows = ordered_json::array();
  for (const auto& pt : grid) {
    ordered_json r;
    r["omega_d_ghz"] = units::to_ghz(pt.omega_d);
    r["Omega_mhz"] = units::to_mhz(pt.Omega);
    r["p_e_ss"] = emitted_population(pt.p_e_ss);
    r["t_eff_mk"] = json_temperature(pt.t_eff);
    r[aux_name] = pt.aux;
    rows.push_back(r);
  }
  return rows;
}

// Interior local maxima of P_e along omega_d at each Omega.
ordered_json grid_maxima(const std::vector<SweepPoint>& grid, std::size_t n_omega) {
  auto out = ordered_json::array();
  if (n_omega == 0 || grid.size() < 3 * n_omega) return out;
  const std::size_t nd = grid.size() / n_omega;
  for (std::size_t o = 0; o < n_omega; ++o) {
    ordered_json m;
    m["Omega_mhz"] = units::to_mhz(grid[o].Omega);
    auto at = ordered_json::array();
    for (std::size_t i = 1; i + 1 < nd; ++i) {
      const double a = grid[(i - 1) * n_omega + o].p_e_ss, b = grid[i * n_omega + o].p_e_ss,
                   c = grid[(i + 1) * n_omega + o].p_e_ss;
      // Flat stretches (round-off ripple) are not maxima.
      const double tol = 1e-9 * std::max(1.0, std::abs(b));
      if (b > a + tol && b > c + tol) at.push_back({{"omega_d_ghz", units::to_ghz(grid[i * n_omega + o].omega_d)}, {"p_e_ss", b}});
    }
    m["local_maxima"] = at;
    out.push_back(m);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path.string(), std::string("cannot open for writing: ") + std::strerror(errno));
  f << text;
  f.flush();
  if (!f) throw IoError(path.string(), "write failed");
}

std::string series_file_stem(const ScenarioResult& r, const std::vector<SeriesResult>& group) {
  const auto scen = to_string(r.config.scenario);
  if (r.config.scenario == Scenario::power_series) {
    return scen + "_Omega_" + format_number(units::to_mhz(group.front().Omega)) + "MHz";
  }
  return scen;
}

// Power-series runs go one file per drive strength; everything else is a single file.
std::vector<std::vector<SeriesResult>> group_series(const ScenarioResult& r) {
  std::vector<std::vector<SeriesResult>> groups;
  if (r.config.scenario != Scenario::power_series) {
    if (!r.series.empty()) groups.push_back(r.series);
    return groups;
  }
  for (const auto& s : r.series) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.front().Omega == s.Omega; });
    if (it == groups.end()) {
      groups.push_back({s});
    } else {
      it->push_back(s);
    }
  }
  return groups;
}

std::vector<SvgSeries> svg_from_series(const std::vector<SeriesResult>& series, bool drop_zero) {
  std::vector<SvgSeries> out;
  for (const auto& s : series) {
    SvgSeries v{s.label, {}, {}};
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (drop_zero && s.t[i] <= 0.0) continue;
      v.x.push_back(s.t[i]);
      v.y.push_back(emitted_population(s.p_e[i]));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<SvgSeries> svg_from_grid(const std::vector<SweepPoint>& grid, std::size_t n_omega, const char* engine) {
  std::vector<SvgSeries> out;
  if (n_omega == 0) return out;
  for (std::size_t o = 0; o < n_omega; ++o) {
    SvgSeries v{std::string(engine) + " Omega=" + format_number(units::to_mhz(grid[o].Omega)) + " MHz", {}, {}};
    for (std::size_t i = o; i < grid.size(); i += n_omega) {
      v.x.push_back(units::to_ghz(grid[i].omega_d));
      v.y.push_back(emitted_population(grid[i].p_e_ss));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

}  // namespace

std::string series_csv(const std::vector<SeriesResult>& series) {
  std::string out = "t_us,p_e,engine\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      out += format_number(s.t[i]);
      out += ',';
      out += format_number(emitted_population(s.p_e[i]));
      out += ',';
      out += s.engine;
      out += '\n';
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& grid) {
  std::string out = "omega_d_ghz,omega_mhz,p_e_ss,t_eff_mk\n";
  for (const auto& pt : grid) {
    out += format_number(units::to_ghz(pt.omega_d)) + ',' + format_number(units::to_mhz(pt.Omega)) + ',' +
           format_number(emitted_population(pt.p_e_ss)) + ',' + temperature_mk(pt.t_eff) + '\n';
  }
  return out;
}

ordered_json summary_json(const ScenarioResult& r) {
  ordered_json j;
  j["config_echo"] = echo(r.config);
  ordered_json res = r.results;
  if (!r.series.empty()) {
    auto arr = ordered_json::array();
    for (const auto& s : r.series) arr.push_back(series_json(s));
    res["series"] = arr;
  }
  const std::size_t n_omega = r.config.sweep.Omega_values().size();
  if (!r.sweep_full.empty()) {
    res["sweep_full"] = grid_json(r.sweep_full, "steady_state_residual");
    res["sweep_full_maxima"] = grid_maxima(r.sweep_full, n_omega);
  }
  if (!r.sweep_channel.empty()) {
    res["sweep_channel"] = grid_json(r.sweep_channel, "rate_matrix_p_e_ss");
    res["sweep_channel_maxima"] = grid_maxima(r.sweep_channel, n_omega);
  }
  if (r.fit) res["fit_points"] = r.fit_data.size();
  j["results"] = res;
  j["diagnostics"] = r.diagnostics;
  j["version"] = kVersion;
  return j;
}

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series, bool log_x) {
  constexpr double W = 720, H = 460, L = 70, R = 180, T = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#d62728", "#8c564b", "#e377c2", "#7f7f7f"};
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (x1 <= x0) x1 = x0 + 1.0;
  y1 = y1 <= 0.0 ? 1.0 : std::min(1.0, std::ceil(y1 * 10.0 + 1e-9) / 10.0);
  auto px = [&](double x) { return L + (tx(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << fixed(W / 2, 1) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << escape_xml(title) << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    const double xp = L + (W - L - R) * k / 5.0, yp = py(yv);
    o << "<line x1=\"" << fixed(xp, 2) << "\" y1=\"" << H - B << "\" x2=\"" << fixed(xp, 2) << "\" y2=\"" << H - B + 5
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(xp, 2) << "\" y=\"" << H - B + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_number(log_x ? std::pow(10.0, xv) : std::round(xv * 1e6) / 1e6) << "</text>\n"
      << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(yp, 2) << "\" x2=\"" << L << "\" y2=\"" << fixed(yp, 2)
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << L - 8 << "\" y=\"" << fixed(yp + 4, 2)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(std::round(yv * 1e6) / 1e6)
      << "</text>\n";
  }
  o << "<text x=\"" << fixed((L + W - R) / 2, 1) << "\" y=\"" << H - 15
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(x_label) << "</text>\n"
    << "<text x=\"18\" y=\"" << fixed((T + H - B) / 2, 1) << "\" transform=\"rotate(-90 18 " << fixed((T + H - B) / 2, 1)
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 8];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) o << ' ';
      o << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2);
    }
    o << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << fixed(ly, 1) << "\" x2=\"" << W - R + 30 << "\" y2=\"" << fixed(ly, 1)
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << W - R + 35 << "\" y=\"" << fixed(ly + 4, 1) << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << escape_xml(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<fs::path> write_outputs(const ScenarioResult& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
  const auto& formats = r.config.outputs;
  auto wants = [&](OutputFormat f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
  const auto scen = to_string(r.config.scenario);
  const bool log_x = r.config.scenario == Scenario::power_series;
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& p, const std::string& text) {
    write_text(p, text);
    written.push_back(p);
  };

  for (const auto& group : group_series(r)) {
    const auto stem = series_file_stem(r, group);
    if (wants(OutputFormat::csv)) emit(dir / (stem + ".csv"), series_csv(group));
    if (wants(OutputFormat::svg)) {
      emit(dir / (stem + ".svg"), render_svg(stem, log_x ? "t (us, log scale)" : "t (us)", "P_e",
                                             svg_from_series(group, log_x), log_x));
    }
  }
  const std::size_t n_omega = r.config.sweep.Omega_values().size();
  for (const auto* grid : {&r.sweep_full, &r.sweep_channel}) {
    if (grid->empty()) continue;
    const std::string stem = grid == &r.sweep_full ? "sweep" : "sweep_channel";
    if (wants(OutputFormat::csv)) emit(dir / (stem + ".csv"), sweep_csv(*grid));
    if (wants(OutputFormat::svg)) {
      emit(dir / (stem + ".svg"), render_svg(stem, "omega_d/2pi (GHz)", "steady P_e",
                                             svg_from_grid(*grid, n_omega, grid == &r.sweep_full ? "full" : "channel")));
    }
  }
  if (wants(OutputFormat::json)) emit(dir / (scen + "_summary.json"), summary_json(r).dump(2) + "\n");
  return written;
}

}  // namespace thermchan::expcli
