// SPDX-License-Identifier: Apache-2.0
#include "dwsl/fit.hpp"

#include <cmath>

#include "dwsl/error.hpp"

namespace dwsl {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorCode::InvalidArgument, "fit_line: size mismatch");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) raise(ErrorCode::FitUnstable, "fit_line: need at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) raise(ErrorCode::FitUnstable, "fit_line: degenerate abscissae");
  LinearFit f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ssr += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.rms_residual = std::sqrt(ssr / n);
  return f;
}

}  // namespace dwsl
