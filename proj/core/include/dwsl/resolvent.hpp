// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dwsl/band.hpp"
#include "dwsl/damping.hpp"
#include "dwsl/fd_grid.hpp"
#include "dwsl/fit.hpp"
#include "dwsl/types.hpp"

namespace dwsl {

inline constexpr int kDefaultResolventGrid = 2048;

// -d^2/dx^2 + 4 pi^2 n^2 - s^2 + i s b by central differences on the grid.
PeriodicTridiagonal<Complex> assemble_mode_operator(double s, double n, const FdGrid& grid);
PeriodicTridiagonal<Complex> assemble_mode_operator(double s, double n,
                                                    const DampingProfile& profile, int grid_n);

struct SingularValueOptions {
  int max_iterations = 400;
  double tolerance = 1e-10;
  unsigned long long seed = 0x51a1ULL;
};

// Inverse iteration on A*A through an LU of A, accelerated by Lanczos.
// Returns 0 when the factorisation hits an exact zero pivot.
double smallest_singular_value(const PeriodicTridiagonal<Complex>& a,
                               const SingularValueOptions& options = {});
double smallest_singular_value(const BandMatrix<Complex>& a,
                               const SingularValueOptions& options = {});

// ceil(|s| / (2 pi)) + 8
int default_mode_cutoff(double s);

struct ResolventOptions {
  int n_max = 0;  // 0 = default_mode_cutoff(s)
  int grid_n = kDefaultResolventGrid;
  // Extrapolate each mode's sigma_min from grid_n and 2 grid_n.
  bool richardson = false;
  SingularValueOptions singular;
};

struct ResolventValue {
  double s = 0.0;
  double norm = 0.0;  // +inf on an exact eigenvalue hit
  int argmax_n = 0;
  double sigma_min = 0.0;
};

// max over |n| <= n_max of 1 / sigma_min of the mode operator.
ResolventValue resolvent_value(double s, const DampingProfile& profile,
                               const ResolventOptions& options = {});
double resolvent_norm(double s, const DampingProfile& profile, int n_max = 0,
                      int grid_n = kDefaultResolventGrid);

struct ResolventScan {
  std::vector<double> s_grid;
  std::vector<double> norms;
  std::vector<int> argmax_n;
  int n_max = 0;
  int grid_n = 0;
  std::pair<double, double> window{0.0, 0.0};
  LinearFit fit;
  double fitted_exponent = 0.0;
};

// Norms over s_grid (in parallel) and a least-squares fit of log norm
// against log s over the window. FitUnstable below 5 window points.
ResolventScan scan_and_fit(const DampingProfile& profile, std::span<const double> s_grid,
                           std::pair<double, double> window, const ResolventOptions& options = {});

// count points on [lo, hi] shifted by a golden-ratio fraction of the spacing.
std::vector<double> offset_grid(double lo, double hi, int count);

// 1 / dist(s^2, {4 pi^2 (m^2 + n^2)}) over |n| <= n_max, the b = 0 oracle.
double free_resolvent_norm(double s, int n_max);

}  // namespace dwsl
