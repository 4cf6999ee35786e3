#include "thermchan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "thermchan/errors.hpp"

namespace thermchan::expcli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct Quantity {
  double value;
  std::string unit;
};

Quantity split_quantity(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ParseError(key, "empty value");
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first) throw ParseError(key, "expected a number, got \"" + s + "\"");
  if (!std::isfinite(v)) throw ParseError(key, "value must be finite");
  return {v, trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)))};
}

double parse_plain(const std::string& key, std::string_view text) {
  const auto q = split_quantity(key, text);
  if (!q.unit.empty()) throw ParseError(key, "unexpected unit \"" + q.unit + "\" on a dimensionless value");
  return q.value;
}

std::size_t parse_count(const std::string& key, std::string_view text) {
  const double v = parse_plain(key, text);
  if (v != std::floor(v) || v < 0.0) throw ParseError(key, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "off" || s == "no") return false;
  throw ParseError(key, "expected a boolean");
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ParseError(key, "must be strictly positive");
}

std::string scalar(const std::string& key, const YAML::Node& node) {
  if (!node.IsScalar()) throw ParseError(key, "expected a scalar value");
  return node.Scalar();
}

Range parse_range(const std::string& key, const YAML::Node& node) {
  if (!node.IsMap()) throw ParseError(key, "expected a {lo, hi, n} block");
  Range r;
  bool lo = false, hi = false, n = false;
  for (const auto& kv : node) {
    const auto sub = kv.first.as<std::string>();
    const std::string full = key + "." + sub;
    if (sub == "lo") {
      r.lo = parse_frequency(full, scalar(full, kv.second));
      lo = true;
    } else if (sub == "hi") {
      r.hi = parse_frequency(full, scalar(full, kv.second));
      hi = true;
    } else if (sub == "n") {
      r.n = parse_count(full, scalar(full, kv.second));
      n = true;
    } else {
      throw ParseError(full, "unknown key");
    }
  }
  if (!lo || !hi || !n) throw ParseError(key, "range needs lo, hi and n");
  return r;
}

void parse_sweep(ScenarioConfig& c, const YAML::Node& node) {
  if (!node.IsMap()) throw ParseError("sweep", "expected a block");
  for (const auto& kv : node) {
    const auto sub = kv.first.as<std::string>();
    const std::string full = "sweep." + sub;
    if (sub == "omega_d") {
      c.sweep.omega_d = parse_range(full, kv.second);
    } else if (sub == "Omega") {
      if (kv.second.IsMap()) {
        c.sweep.Omega_range = parse_range(full, kv.second);
      } else {
        c.sweep.Omega_fixed = parse_frequency(full, scalar(full, kv.second));
        c.sweep.Omega_range.reset();
      }
    } else {
      throw ParseError(full, "unknown key");
    }
    c.explicit_keys.insert(full);
  }
}

std::vector<std::string> parse_list(const std::string& key, const YAML::Node& node) {
  std::vector<std::string> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(trim(scalar(key, item)));
  } else {
    std::stringstream ss(scalar(key, node));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::rabi: return "rabi";
    case Scenario::thermalize: return "thermalize";
    case Scenario::power_series: return "power_series";
    case Scenario::sweep: return "sweep";
    case Scenario::channel_compare: return "channel_compare";
    case Scenario::fit: return "fit";
  }
  return "?";
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::full: return "full";
    case Engine::channel: return "channel";
    case Engine::both: return "both";
  }
  return "?";
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
  }
  return "?";
}

Scenario parse_scenario(std::string_view s) {
  for (auto v : {Scenario::rabi, Scenario::thermalize, Scenario::power_series, Scenario::sweep,
                 Scenario::channel_compare, Scenario::fit}) {
    if (to_string(v) == s) return v;
  }
  throw ParseError("scenario", "unknown scenario \"" + std::string(s) + "\"");
}

Engine parse_engine(std::string_view s) {
  for (auto v : {Engine::full, Engine::channel, Engine::both}) {
    if (to_string(v) == s) return v;
  }
  throw ParseError("engine", "unknown engine \"" + std::string(s) + "\"");
}

std::vector<OutputFormat> parse_formats(std::string_view comma_list) {
  std::vector<OutputFormat> out;
  std::stringstream ss{std::string(comma_list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    OutputFormat f;
    if (item == "csv") {
      f = OutputFormat::csv;
    } else if (item == "json") {
      f = OutputFormat::json;
    } else if (item == "svg") {
      f = OutputFormat::svg;
    } else {
      throw ParseError("outputs", "unknown format \"" + item + "\"");
    }
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  return out;
}

double Range::at(std::size_t i) const {
  if (n < 2) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<double> SweepSpec::Omega_values() const {
  if (!Omega_range) return {Omega_fixed};
  std::vector<double> v(Omega_range->n);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Omega_range->at(i);
  return v;
}

double parse_frequency(const std::string& key, std::string_view value) {
  const auto q = split_quantity(key, value);
  if (q.unit == "GHz") return units::ghz(q.value);
  if (q.unit == "MHz") return units::mhz(q.value);
  if (q.unit == "kHz") return units::khz(q.value);
  if (q.unit == "Hz") return units::khz(q.value * 1e-3);
  if (q.unit == "rad/us") return q.value;
  if (q.unit.empty()) throw ParseError(key, "missing frequency unit (GHz, MHz, kHz, Hz, rad/us)");
  throw ParseError(key, "unit mismatch: \"" + q.unit + "\" is not a frequency unit");
}

double parse_time(const std::string& key, std::string_view value) {
  const auto q = split_quantity(key, value);
  if (q.unit == "us" || q.unit == "\xC2\xB5s") return q.value;
  if (q.unit == "ns") return q.value * 1e-3;
  if (q.unit == "ms") return q.value * 1e3;
  if (q.unit == "s") return q.value * 1e6;
  if (q.unit.empty()) throw ParseError(key, "missing time unit (s, ms, us, ns)");
  throw ParseError(key, "unit mismatch: \"" + q.unit + "\" is not a time unit");
}

double parse_temperature(const std::string& key, std::string_view value) {
  const auto q = split_quantity(key, value);
  if (q.unit == "K") return q.value;
  if (q.unit == "mK") return q.value * 1e-3;
  if (q.unit.empty()) throw ParseError(key, "missing temperature unit (K, mK)");
  throw ParseError(key, "unit mismatch: \"" + q.unit + "\" is not a temperature unit");
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  apply_preset(c);
  return c;
}

void apply_preset(ScenarioConfig& c) {
  auto set = [&](const char* key, auto& field, auto value) {
    if (!c.is_explicit(key)) field = value;
  };
  switch (c.scenario) {
    case Scenario::rabi:
      set("omega_q", c.params.omega_q, units::ghz(5.46));
      set("omega_d", c.params.omega_d, units::ghz(5.46));
      set("Omega", c.params.Omega, units::mhz(5.2));
      set("t_max", c.t_max, 1.0);
      set("samples", c.samples, std::size_t{1001});
      break;
    case Scenario::thermalize:
      set("t_max", c.t_max, 2.0);
      set("samples", c.samples, std::size_t{401});
      break;
    case Scenario::power_series:
      set("t_max", c.t_max, 100.0);
      set("samples", c.samples, std::size_t{241});
      break;
    case Scenario::sweep:
      break;
    case Scenario::channel_compare:
      set("t_max", c.t_max, 2.0);
      set("samples", c.samples, std::size_t{401});
      set("engine", c.engine, Engine::both);
      break;
    case Scenario::fit:
      break;
  }
}

void validate(const ScenarioConfig& c) {
  const auto& p = c.params;
  require_positive("omega_q", p.omega_q);
  require_positive("omega_r", p.omega_r);
  require_positive("omega_d", p.omega_d);
  require_positive("eta", p.eta);
  require_positive("Omega", p.Omega);
  require_positive("gamma_r", p.gamma_r);
  require_positive("t1", p.t1);
  require_positive("hbar_over_kb", p.hbar_over_kb);
  if (!(p.t_bath >= 0.0)) throw ParseError("t_bath", "must be non-negative");
  if (!(p.dephasing_rate >= 0.0)) throw ParseError("dephasing_rate", "must be non-negative");
  if (p.fock_dim < 3) throw ParseError("fock_dim", "must be at least 3");
  require_positive("t_max", c.t_max);
  require_positive("t_min", c.t_min);
  if (c.samples < 2) throw ParseError("samples", "must be at least 2");
  if (!(c.tol >= 1e-12 && c.tol <= 1e-4)) throw ParseError("tol", "must lie in [1e-12, 1e-4]");
  if (c.teff_omega_q) require_positive("teff_omega_q", *c.teff_omega_q);
  auto check_range = [](const std::string& key, const Range& r) {
    require_positive(key + ".lo", r.lo);
    if (r.n < 2) throw ParseError(key + ".n", "must be at least 2");
    if (!(r.lo < r.hi)) throw ParseError(key, "lo must be below hi");
  };
  check_range("sweep.omega_d", c.sweep.omega_d);
  if (c.sweep.Omega_range) {
    check_range("sweep.Omega", *c.sweep.Omega_range);
  } else {
    require_positive("sweep.Omega", c.sweep.Omega_fixed);
  }
  for (const auto& name : c.fit_free) {
    if (name != "eta" && name != "Omega" && name != "t1" && name != "gamma_r") {
      throw ParseError("fit_free", "cannot fit \"" + name + "\" (allowed: eta, Omega, t1, gamma_r)");
    }
  }
}

namespace {
void force_scenario(ScenarioConfig& c, std::optional<Scenario> forced) {
  if (!forced) return;
  if (c.is_explicit("scenario") && c.scenario != *forced) {
    throw ParseError("scenario", "document selects " + to_string(c.scenario) + " but " + to_string(*forced) +
                                     " was requested");
  }
  c.scenario = *forced;
}
}  // namespace

ScenarioConfig parse_config(std::string_view text, std::optional<Scenario> forced) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError("", std::string("malformed document: ") + e.what());
  }
  ScenarioConfig c;
  if (doc.IsNull()) {
    force_scenario(c, forced);
    apply_preset(c);
    return c;
  }
  if (!doc.IsMap()) throw ParseError("", "configuration must be a key-value document");

  auto& p = c.params;
  for (const auto& kv : doc) {
    const auto key = kv.first.as<std::string>();
    if (c.explicit_keys.count(key)) throw ParseError(key, "duplicate key");
    const auto& node = kv.second;
    if (key == "sweep") {
      parse_sweep(c, node);
      c.explicit_keys.insert(key);
      continue;
    }
    if (key == "outputs") {
      std::string joined;
      for (const auto& s : parse_list(key, node)) joined += s + ",";
      c.outputs = parse_formats(joined);
      c.explicit_keys.insert(key);
      continue;
    }
    if (key == "fit_free") {
      c.fit_free = parse_list(key, node);
      c.explicit_keys.insert(key);
      continue;
    }
    const std::string v = scalar(key, node);
    if (key == "scenario") {
      c.scenario = parse_scenario(trim(v));
    } else if (key == "engine") {
      c.engine = parse_engine(trim(v));
    } else if (key == "omega_q") {
      p.omega_q = parse_frequency(key, v);
    } else if (key == "omega_r") {
      p.omega_r = parse_frequency(key, v);
    } else if (key == "omega_d") {
      p.omega_d = parse_frequency(key, v);
    } else if (key == "eta") {
      p.eta = parse_frequency(key, v);
    } else if (key == "Omega") {
      p.Omega = parse_frequency(key, v);
    } else if (key == "gamma_r") {
      p.gamma_r = parse_frequency(key, v);
    } else if (key == "t1") {
      p.t1 = parse_time(key, v);
    } else if (key == "t_bath") {
      p.t_bath = parse_temperature(key, v);
    } else if (key == "fock_dim") {
      p.fock_dim = parse_count(key, v);
    } else if (key == "qubit_thermal") {
      p.qubit_thermal = parse_bool(key, v);
    } else if (key == "dephasing_rate") {
      p.dephasing_rate = parse_frequency(key, v);
    } else if (key == "hbar_over_kb") {
      p.hbar_over_kb = parse_plain(key, v);
    } else if (key == "t_max") {
      c.t_max = parse_time(key, v);
    } else if (key == "t_min") {
      c.t_min = parse_time(key, v);
    } else if (key == "samples") {
      c.samples = parse_count(key, v);
    } else if (key == "tol") {
      c.tol = parse_plain(key, v);
    } else if (key == "teff_omega_q") {
      c.teff_omega_q = parse_frequency(key, v);
    } else if (key == "fit_data") {
      c.fit_data = trim(v);
    } else {
      throw ParseError(key, "unknown key");
    }
    c.explicit_keys.insert(key);
  }
  force_scenario(c, forced);
  apply_preset(c);
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<Scenario> forced) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_config(ss.str(), forced);
  // Trace files are looked up next to the document that names them.
  if (!c.fit_data.empty() && std::filesystem::path(c.fit_data).is_relative()) {
    c.fit_data = (path.parent_path() / c.fit_data).lexically_normal().string();
  }
  return c;
}

nlohmann::ordered_json echo(const ScenarioConfig& c) {
  const auto& p = c.params;
  nlohmann::ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["engine"] = to_string(c.engine);
  j["omega_q_ghz"] = units::to_ghz(p.omega_q);
  j["omega_r_ghz"] = units::to_ghz(p.omega_r);
  j["omega_d_ghz"] = units::to_ghz(p.omega_d);
  j["eta_mhz"] = units::to_mhz(p.eta);
  j["Omega_mhz"] = units::to_mhz(p.Omega);
  j["gamma_r_mhz"] = units::to_mhz(p.gamma_r);
  j["t1_us"] = p.t1;
  j["t_bath_mk"] = p.t_bath * 1e3;
  j["fock_dim"] = p.fock_dim;
  j["qubit_thermal"] = p.qubit_thermal;
  j["dephasing_rate_per_us"] = units::to_mhz(p.dephasing_rate);
  j["hbar_over_kb_k_us"] = p.hbar_over_kb;
  j["t_max_us"] = c.t_max;
  j["t_min_us"] = c.t_min;
  j["samples"] = c.samples;
  j["tol"] = c.tol;
  j["teff_omega_q_ghz"] = units::to_ghz(c.teff_reference());
  auto outputs = nlohmann::ordered_json::array();
  for (auto f : c.outputs) outputs.push_back(to_string(f));
  j["outputs"] = outputs;
  if (c.scenario == Scenario::sweep) {
    nlohmann::ordered_json s;
    s["omega_d_ghz"] = {{"lo", units::to_ghz(c.sweep.omega_d.lo)},
                        {"hi", units::to_ghz(c.sweep.omega_d.hi)},
                        {"n", c.sweep.omega_d.n}};
    if (c.sweep.Omega_range) {
      s["Omega_mhz"] = {{"lo", units::to_mhz(c.sweep.Omega_range->lo)},
                        {"hi", units::to_mhz(c.sweep.Omega_range->hi)},
                        {"n", c.sweep.Omega_range->n}};
    } else {
      s["Omega_mhz"] = units::to_mhz(c.sweep.Omega_fixed);
    }
    j["sweep"] = s;
  }
  if (c.scenario == Scenario::power_series) {
    auto om = nlohmann::ordered_json::array();
    for (double o : c.power_series_Omegas) om.push_back(units::to_mhz(o));
    j["power_series_Omega_mhz"] = om;
  }
  if (c.scenario == Scenario::fit) {
    j["fit_data"] = c.fit_data;
    j["fit_free"] = c.fit_free;
  }
  return j;
}

}  // namespace thermchan::expcli
