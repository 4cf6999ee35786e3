#include "thermchan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermchan::expcli {

namespace {

using Point = std::vector<double>;

Point clamp_to(Point x, const SimplexOptions& o) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!o.lower.empty()) x[i] = std::max(x[i], o.lower[i]);
    if (!o.upper.empty()) x[i] = std::min(x[i], o.upper[i]);
  }
  return x;
}

Point affine(const Point& a, const Point& b, double t) {
  // a + t (b - a)
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          const SimplexOptions& opts) {
  const std::size_t n = x0.size();
  x0 = clamp_to(std::move(x0), opts);
  if (n == 0) return {x0, f(x0), 0, true};

  std::vector<Point> pts{x0};
  for (std::size_t i = 0; i < n; ++i) {
    Point p = x0;
    p[i] += opts.initial_step;
    if (!opts.upper.empty() && p[i] > opts.upper[i]) p[i] = x0[i] - opts.initial_step;
    pts.push_back(clamp_to(std::move(p), opts));
  }
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> idx(n + 1);
  SimplexResult res;
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(pts[i][k] - pts[best][k]));
    }
    if (size < opts.size_tol) {
      res.converged = true;
      break;
    }

    Point centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
    }

    const Point xr = clamp_to(affine(centroid, pts[worst], -1.0), opts);
    const double fr = f(xr);
    if (fr < vals[best]) {
      const Point xe = clamp_to(affine(centroid, pts[worst], -2.0), opts);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < vals[worst];
    const Point xc = clamp_to(affine(centroid, outside ? xr : pts[worst], 0.5), opts);
    const double fc = f(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = affine(pts[best], pts[i], 0.5);
      vals[i] = f(pts[i]);
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[b];
  res.value = vals[b];
  return res;
}

}  // namespace thermchan::expcli
