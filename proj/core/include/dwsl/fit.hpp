// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace dwsl {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rms_residual = 0.0;
  int points = 0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dwsl
