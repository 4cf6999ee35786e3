#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace thermchan::expcli {

struct SimplexOptions {
  std::size_t max_iterations = 500;
  double size_tol = 1e-6;     // max vertex distance from the best vertex (infinity norm)
  double initial_step = 0.1;  // offset of the initial vertices along each axis
  std::vector<double> lower;  // box bounds, empty for none
  std::vector<double> upper;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Nelder-Mead with standard coefficients (1, 2, 1/2, 1/2). Trial points are
// clamped into the box. Deterministic for a given start.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const SimplexOptions& opts = {});

}  // namespace thermchan::expcli
