#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "frostman/errors.hpp"

namespace frostman {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double max_residual = 0;
};

// Ordinary least squares y = intercept + slope * x.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("least_squares: need >= 2 points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (det == 0) throw ConfigError("least_squares: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  for (size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

// Minimizes over R >= 0 the spread max_i(y_i - R x_i) - min_i(y_i - R x_i);
// the spread is convex in R, so golden-section search suffices. Used to fit
// the constant of the slow-growth correction exp(R sqrt(log 1/r)).
inline std::pair<double, double> min_range_shift(const std::vector<double>& x,
                                                 const std::vector<double>& y, double r_max = 16.0) {
  if (x.size() != y.size() || x.empty()) throw ConfigError("min_range_shift: empty input");
  auto range = [&](double R) {
    double lo = 1.0 / 0.0, hi = -1.0 / 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double v = y[i] - R * x[i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  };
  double a = 0.0, b = r_max;
  const double gr = 0.618033988749894848;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = range(c), fd = range(d);
  for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = range(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = range(d);
    }
  }
  double R = 0.5 * (a + b);
  if (range(0.0) <= range(R)) R = 0.0;
  return {R, range(R)};
}

}  // namespace frostman
