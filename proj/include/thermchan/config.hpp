#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "thermchan/model.hpp"

namespace thermchan::expcli {

enum class Scenario { rabi, thermalize, power_series, sweep, channel_compare, fit };
enum class Engine { full, channel, both };
enum class OutputFormat { csv, json, svg };

std::string to_string(Scenario s);
std::string to_string(Engine e);
std::string to_string(OutputFormat f);
Scenario parse_scenario(std::string_view s);
Engine parse_engine(std::string_view s);
std::vector<OutputFormat> parse_formats(std::string_view comma_list);

// Axis in internal units (rad/us).
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 2;

  double at(std::size_t i) const;
};

struct SweepSpec {
  Range omega_d{units::ghz(5.43), units::ghz(5.47), 81};
  std::optional<Range> Omega_range;  // unset: fixed strength below
  double Omega_fixed = units::mhz(5.8);

  std::vector<double> Omega_values() const;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::thermalize;
  model::SystemParams params;
  double t_max = 2.0;    // us
  double t_min = 1e-3;   // us, first nonzero sample of log grids
  std::size_t samples = 401;
  double tol = 1e-10;
  Engine engine = Engine::full;
  std::vector<OutputFormat> outputs{OutputFormat::csv, OutputFormat::json};
  SweepSpec sweep;
  std::string fit_data;
  std::vector<std::string> fit_free;
  std::optional<double> teff_omega_q;  // defaults to params.omega_q
  std::vector<double> power_series_Omegas{units::mhz(1.5), units::mhz(2.0), units::mhz(3.5), units::mhz(5.0)};

  std::set<std::string> explicit_keys;

  double teff_reference() const { return teff_omega_q.value_or(params.omega_q); }
  bool is_explicit(const std::string& key) const { return explicit_keys.count(key) > 0; }
};

// Parses the YAML document; missing keys take the thermalization defaults and
// scenario presets are applied to every key not given explicitly.
// A forced scenario (CLI subcommand) must agree with the document's own, if any.
ScenarioConfig parse_config(std::string_view text, std::optional<Scenario> forced = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path, std::optional<Scenario> forced = std::nullopt);

// Defaults for a scenario with no document at all.
ScenarioConfig default_config(Scenario s);

// Re-applies presets after the scenario was changed (e.g. by a CLI subcommand).
void apply_preset(ScenarioConfig& c);

// Re-validates everything; throws ParseError naming the key.
void validate(const ScenarioConfig& c);

// Resolved configuration in document units, for the JSON summary.
nlohmann::ordered_json echo(const ScenarioConfig& c);

// "5.448 GHz" -> rad/us, "5.2 us" -> us, "20 mK" -> K. Throws ParseError naming key.
double parse_frequency(const std::string& key, std::string_view value);
double parse_time(const std::string& key, std::string_view value);
double parse_temperature(const std::string& key, std::string_view value);

}  // namespace thermchan::expcli
