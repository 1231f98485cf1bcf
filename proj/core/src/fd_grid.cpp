// SPDX-License-Identifier: Apache-2.0
#include "dwsl/fd_grid.hpp"

#include <cmath>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"

namespace dwsl {

FdGrid make_fd_grid(const DampingProfile& profile, int grid_n) {
  if (grid_n < 64) raise(ErrorCode::InvalidArgument, "grid_N must be >= 64");
  FdGrid g;
  g.size = grid_n;
  g.dx = 1.0 / grid_n;
  g.x.resize(grid_n);
  g.b.resize(grid_n);
  for (int j = 0; j < grid_n; ++j) {
    g.x[j] = -0.5 + j * g.dx;
    g.b[j] = profile(g.x[j]);
  }
  for (double jump : profile.jumps()) {
    const double pos = (jump + 0.5) * grid_n;
    const double node = std::round(pos);
    if (std::abs(pos - node) > 1e-9 * grid_n)
      raise(ErrorCode::InvalidArgument, "grid_N = " + std::to_string(grid_n) +
                                            " does not put the jump at x = " + format_double(jump) +
                                            " on a node");
    const int j = static_cast<int>(node) % grid_n;
    g.b[j] = 0.5 * (profile.limit(jump, -1) + profile.limit(jump, +1));
  }
  return g;
}

}  // namespace dwsl
