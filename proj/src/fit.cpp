#include "thermchan/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thermchan/engines.hpp"
#include "thermchan/errors.hpp"
#include "thermchan/simplex.hpp"

namespace thermchan::expcli {

namespace {

double& field(model::SystemParams& p, const std::string& name) {
  if (name == "eta") return p.eta;
  if (name == "Omega") return p.Omega;
  if (name == "t1") return p.t1;
  if (name == "gamma_r") return p.gamma_r;
  throw ParseError("fit_free", "cannot fit \"" + name + "\"");
}

}  // namespace

FitResult fit_trace(std::span<const TracePoint> data, const std::vector<std::string>& free, const ScenarioConfig& c) {
  if (data.size() < 10) throw ContractError("fitting needs at least 10 data points");
  std::vector<TracePoint> pts(data.begin(), data.end());
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.t_us < b.t_us; });
  if (pts.front().t_us < 0.0) throw ContractError("trace times must be non-negative");

  // Integration grid must start at 0.
  std::vector<double> grid;
  const std::size_t offset = pts.front().t_us > 0.0 ? 1 : 0;
  if (offset) grid.push_back(0.0);
  for (const auto& pt : pts) grid.push_back(pt.t_us);

  const bool bare = c.scenario == Scenario::rabi;
  const model::SystemParams base = c.params;
  std::vector<double> start;
  model::SystemParams scratch = base;
  for (const auto& name : free) start.push_back(field(scratch, name));

  auto apply = [&](const std::vector<double>& u) {
    model::SystemParams p = base;
    for (std::size_t i = 0; i < free.size(); ++i) field(p, free[i]) = start[i] * std::exp(u[i]);
    return p;
  };
  auto rms = [&](const model::SystemParams& p) {
    const auto r = bare ? run_bare_qubit(p, grid, c.tol) : run_full(p, grid, c.tol);
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = r.p_e[i + offset] - pts[i].p_e;
      acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pts.size()));
  };

  // Search in log space: u = ln(x / x0) in [ln 0.1, ln 10].
  SimplexOptions opts;
  opts.lower.assign(free.size(), std::log(0.1));
  opts.upper.assign(free.size(), std::log(10.0));
  const auto best = nelder_mead([&](const std::vector<double>& u) { return rms(apply(u)); },
                                std::vector<double>(free.size(), 0.0), opts);

  FitResult out;
  out.params = apply(best.x);
  out.residual = best.value;
  out.iterations = best.iterations;
  out.converged = best.converged;
  for (const auto& name : free) {
    const double v = field(out.params, name);
    if (name == "t1") {
      out.fitted.push_back({name, v, v, "us"});
    } else {
      out.fitted.push_back({name, v, units::to_mhz(v), "MHz"});
    }
  }
  return out;
}

std::vector<TracePoint> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open trace file");
  std::vector<TracePoint> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && !std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '.') {
      continue;  // header
    }
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected t_us,p_e");
    }
    try {
      out.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return out;
}

}  // namespace thermchan::expcli
