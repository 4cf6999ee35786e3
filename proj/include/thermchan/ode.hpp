#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace thermchan::ode {

using State = Eigen::VectorXcd;
// dy = f(t, y); dy is pre-sized by the caller.
using Rhs = std::function<void(double t, const State& y, State& dy)>;
using Sampler = std::function<void(std::size_t index, double t, const State& y)>;

struct Options {
  double rtol = 1e-8;
  double atol = 1e-8;
  double initial_step = 0.0;  // 0 selects a step automatically
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 50'000'000;
  // Optional projection onto an invariant set, applied to every accepted and
  // interpolated state. Keeps round-off from growing in directions the exact
  // flow never visits once the step size sits at the stability edge.
  std::function<void(State&)> project;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// Dormand-Prince 5(4) with PI step control and 4th-order dense output.
// t_out must be ascending with t_out[0] the initial time; y0 is the state there.
// Throws StepUnderflowError when the step collapses.
Stats integrate_dopri5(const Rhs& f, const State& y0, std::span<const double> t_out, const Options& opts,
                       const Sampler& sample);

}  // namespace thermchan::ode
