// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dwsl/damping.hpp"

namespace dwsl {

// Periodic nodes x_j = -1/2 + j/N. Every jump of b must fall on a node; such
// nodes carry the mean of the two one-sided limits.
struct FdGrid {
  int size = 0;
  double dx = 0.0;
  std::vector<double> x;
  std::vector<double> b;
};

FdGrid make_fd_grid(const DampingProfile& profile, int grid_n);

}  // namespace dwsl
