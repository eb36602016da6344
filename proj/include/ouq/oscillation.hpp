#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ouq/common.hpp"
#include "ouq/response.hpp"

namespace ouq {

/// Controls for the oscillation search: coarse grid, refinement passes
/// around the incumbent, then coordinate-wise golden-section polish.
struct OscillationSearch {
  std::size_t coarse_points = 33;   // per axis
  std::size_t refine_passes = 2;
  std::size_t polish_cycles = 16;
  double polish_tol = 1e-12;
};

/// Maximum oscillation of the response along one axis, with the achieving
/// pair of points.
struct OscillationResult {
  double value = 0.0;
  std::vector<double> point_hi;  // argmax of f on the achieving slice
  std::vector<double> point_lo;  // argmin of f on the achieving slice
};

namespace detail {

inline double golden_max(double lo, double hi, const std::function<double(double)>& g,
                         std::size_t iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (std::size_t it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace detail

/// Component-wise oscillation Osc_axis(f): the largest change of the
/// response achievable by varying only the given axis, everything else
/// held anywhere in the box. Computed by exhaustive coarse search, nested
/// refinement and golden-section polish; exact for the linear and constant
/// cases up to polish tolerance.
inline OscillationResult oscillation(const ResponseModel& model, std::size_t axis,
                                     const OscillationSearch& cfg = {}) {
  const BoxDomain& box = model.box();
  const std::size_t m = box.dimension();
  if (axis >= m) throw InvalidArgument("oscillation: axis out of range");

  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < m; ++j)
    if (j != axis) others.push_back(j);

  auto eval = [&](const std::vector<double>& x) {
    double v = model(x);
    if (!std::isfinite(v))
      throw DomainError("oscillation: non-finite response at " + detail::format_point(x));
    return v;
  };

  // Incumbent slice: values of the off-axis coordinates plus the axis
  // positions achieving max and min of f on that slice.
  std::vector<double> best_other(others.size());
  double best_hi = 0.0, best_lo = 0.0, best_range = -1.0;

  auto scan_slice = [&](const std::vector<double>& other_vals, const std::vector<double>& axis_grid) {
    std::vector<double> x(m);
    for (std::size_t j = 0; j < others.size(); ++j) x[others[j]] = other_vals[j];
    double mx = -1e300, mn = 1e300, amx = axis_grid.front(), amn = axis_grid.front();
    for (double t : axis_grid) {
      x[axis] = t;
      const double v = eval(x);
      if (v > mx) {
        mx = v;
        amx = t;
      }
      if (v < mn) {
        mn = v;
        amn = t;
      }
    }
    if (mx - mn > best_range) {
      best_range = mx - mn;
      best_other = other_vals;
      best_hi = amx;
      best_lo = amn;
    }
  };

  auto linspace = [](double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
  };

  // Pass 0: full-box coarse grid. Passes 1..refine: shrink the off-axis
  // windows around the incumbent; the axis scan stays global (it is cheap
  // and the extremal pair can sit on opposite sides of a kink).
  for (std::size_t pass = 0; pass <= cfg.refine_passes; ++pass) {
    std::vector<std::vector<double>> grids(others.size());
    for (std::size_t j = 0; j < others.size(); ++j) {
      const Axis& ax = box.axis(others[j]);
      if (pass == 0) {
        grids[j] = linspace(ax.lo, ax.hi, cfg.coarse_points);
      } else {
        const double halfwidth = ax.width() * std::pow(2.0 / static_cast<double>(cfg.coarse_points - 1),
                                                       static_cast<double>(pass));
        grids[j] = linspace(ax.clamp(best_other[j] - halfwidth), ax.clamp(best_other[j] + halfwidth),
                            cfg.coarse_points);
      }
    }
    const std::size_t axis_n = pass == 0 ? cfg.coarse_points : 2 * cfg.coarse_points - 1;
    const std::vector<double> axis_grid = linspace(box.axis(axis).lo, box.axis(axis).hi, axis_n);

    std::vector<std::size_t> idx(others.size(), 0);
    std::vector<double> other_vals(others.size());
    for (;;) {
      for (std::size_t j = 0; j < others.size(); ++j) other_vals[j] = grids[j][idx[j]];
      scan_slice(other_vals, axis_grid);
      std::size_t j = 0;
      while (j < others.size() && ++idx[j] == grids[j].size()) idx[j++] = 0;
      if (j == others.size()) break;
    }
  }

  // Range of f over the axis on one slice: fine scan, then golden polish
  // bracketed by the winning cells. Returns the range and both argpoints.
  auto slice_range = [&](const std::vector<double>& other_vals, double& arg_hi, double& arg_lo) {
    std::vector<double> x(m);
    for (std::size_t j = 0; j < others.size(); ++j) x[others[j]] = other_vals[j];
    const Axis& ax = box.axis(axis);
    const std::size_t n = 4 * cfg.coarse_points + 1;
    double mx = -1e300, mn = 1e300;
    std::size_t imx = 0, imn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[axis] = ax.lo + ax.width() * static_cast<double>(i) / static_cast<double>(n - 1);
      const double v = eval(x);
      if (v > mx) {
        mx = v;
        imx = i;
      }
      if (v < mn) {
        mn = v;
        imn = i;
      }
    }
    const double cell = ax.width() / static_cast<double>(n - 1);
    auto at = [&](std::size_t i) { return ax.lo + cell * static_cast<double>(i); };
    auto f_at = [&](double t) {
      x[axis] = t;
      return eval(x);
    };
    arg_hi = detail::golden_max(ax.clamp(at(imx) - cell), ax.clamp(at(imx) + cell), f_at, 60);
    if (f_at(at(imx)) > f_at(arg_hi)) arg_hi = at(imx);
    arg_lo = detail::golden_max(ax.clamp(at(imn) - cell), ax.clamp(at(imn) + cell),
                                [&](double t) { return -f_at(t); }, 60);
    if (f_at(at(imn)) < f_at(arg_lo)) arg_lo = at(imn);
    return f_at(arg_hi) - f_at(arg_lo);
  };

  // Polish the off-axis coordinates by compass search with the axis pair
  // re-optimized inside every probe. Diagonal probes let the search crawl
  // curved ridges where the extremal axis position shifts with the slice.
  double cur = best_range;
  {
    double ah = best_hi, al = best_lo;
    const double r = slice_range(best_other, ah, al);
    if (r >= cur) {
      cur = r;
      best_hi = ah;
      best_lo = al;
    }
  }
  if (!others.empty()) {
    const std::size_t d = others.size();
    std::vector<std::vector<double>> dirs;
    for (std::size_t j = 0; j < d; ++j) {
      for (double s : {+1.0, -1.0}) {
        std::vector<double> e(d, 0.0);
        e[j] = s;
        dirs.push_back(e);
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j + 1; k < d; ++k) {
        for (double sj : {+1.0, -1.0}) {
          for (double sk : {+1.0, -1.0}) {
            std::vector<double> e(d, 0.0);
            e[j] = sj;
            e[k] = sk;
            dirs.push_back(e);
          }
        }
      }
    }
    double step = 0.02;  // relative to each axis width
    const std::size_t max_rounds = 50 * cfg.polish_cycles;
    for (std::size_t round = 0; round < max_rounds && step > 1e-10; ++round) {
      bool improved = false;
      for (const auto& e : dirs) {
        std::vector<double> o = best_other;
        for (std::size_t j = 0; j < d; ++j)
          o[j] = box.axis(others[j]).clamp(o[j] + e[j] * step * box.axis(others[j]).width());
        double th, tl;
        const double r = slice_range(o, th, tl);
        if (r > cur + cfg.polish_tol) {
          cur = r;
          best_other = std::move(o);
          best_hi = th;
          best_lo = tl;
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  std::vector<double> x_hi(m), x_lo(m);
  for (std::size_t j = 0; j < others.size(); ++j) {
    x_hi[others[j]] = best_other[j];
    x_lo[others[j]] = best_other[j];
  }
  x_hi[axis] = best_hi;
  x_lo[axis] = best_lo;
  if (eval(x_hi) < eval(x_lo)) std::swap(x_hi, x_lo);
  return OscillationResult{std::abs(eval(x_hi) - eval(x_lo)), x_hi, x_lo};
}

/// All sub-diameters D_i = Osc_i(f) of the response.
inline std::vector<double> sub_diameters(const ResponseModel& model,
                                         const OscillationSearch& cfg = {}) {
  std::vector<double> d(model.dimension());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = oscillation(model, i, cfg).value;
  return d;
}

}  // namespace ouq
