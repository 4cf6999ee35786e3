#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "thermchan/scenarios.hpp"

namespace thermchan::expcli {

inline constexpr const char* kVersion = "0.1.0";

// Fixed-schema text renderings; the writers below only add file handling.
std::string series_csv(const std::vector<SeriesResult>& series);
std::string sweep_csv(const std::vector<SweepPoint>& grid);
nlohmann::ordered_json summary_json(const ScenarioResult& r);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series, bool log_x = false);

// Writes every requested format into dir and returns the paths, in order.
// Throws Error with the offending path on I/O failure.
std::vector<std::filesystem::path> write_outputs(const ScenarioResult& r, const std::filesystem::path& dir);

// "%.12g" with the literals inf / -inf / nan.
std::string format_number(double v);

}  // namespace thermchan::expcli
