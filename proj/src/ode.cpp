#include "thermchan/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermchan/errors.hpp"

namespace thermchan::ode {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const State& err, const State& y0, const State& y1, const Options& o) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

double scaled_norm(const State& v, const State& y, const Options& o) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v[i]) / (o.atol + o.rtol * std::abs(y[i]));
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

}  // namespace

Stats integrate_dopri5(const Rhs& f, const State& y0, std::span<const double> t_out, const Options& opts,
                       const Sampler& sample) {
  Stats stats;
  if (t_out.empty()) return stats;
  const auto n = y0.size();
  double t = t_out.front();
  const double t_end = t_out.back();
  State y = y0;
  sample(0, t, y);
  std::size_t next = 1;
  while (next < t_out.size() && t_out[next] <= t) sample(next++, t, y);
  if (next == t_out.size()) return stats;

  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  State r1(n), r2(n), r3(n), r4(n), r5(n), yout(n);
  f(t, y, k1);
  ++stats.evaluations;

  double h = opts.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    const double dnf = scaled_norm(k1, y, opts);
    const double dny = scaled_norm(y, y, opts);
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h0 = std::min(h0, t_end - t);
    ytmp = y + h0 * k1;
    f(t + h0, ytmp, k2);
    ++stats.evaluations;
    const double der2 = scaled_norm(k2 - k1, y, opts) / h0;
    const double der = std::max(der2, dnf);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  constexpr double kSafety = 0.9, kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0;
  double err_old = 1e-4;
  bool last_rejected = false;

  while (next < t_out.size()) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      throw NoConvergenceError("integrator exceeded the step budget at t = " + std::to_string(t), 0.0);
    }
    h = std::min(h, t_end - t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw StepUnderflowError(t, h);
    }

    ytmp = y + h * a21 * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    stats.evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, opts);
    if (!std::isfinite(en)) {
      ++stats.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }

    if (en <= 1.0) {
      const double t_new = t + h;
      if (opts.project) opts.project(ynew);
      // Dense output for every requested time inside (t, t_new].
      if (next < t_out.size() && t_out[next] <= t_new) {
        r1 = y;
        r2 = ynew - y;
        r3 = h * k1 - r2;
        r4 = r2 - h * k7 - r3;
        r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next < t_out.size() && t_out[next] <= t_new) {
          if (t_out[next] == t_new) {
            sample(next, t_new, ynew);
          } else {
            const double th = (t_out[next] - t) / h;
            const double th1 = 1.0 - th;
            yout = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
            if (opts.project) opts.project(yout);
            sample(next, t_out[next], yout);
          }
          ++next;
        }
      }
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;

      const double e = std::max(en, 1e-10);
      double fac = kSafety * std::pow(e, -kAlpha) * std::pow(err_old, kBeta);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h *= fac;
      err_old = e;
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, kSafety * std::pow(en, -0.2));
      last_rejected = true;
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  return stats;
}

}  // namespace thermchan::ode
