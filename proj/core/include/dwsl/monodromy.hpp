// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "dwsl/damping.hpp"
#include "dwsl/types.hpp"

namespace dwsl {

// Row-major [[m11, m12], [m21, m22]].
using Matrix2 = std::array<Complex, 4>;

struct MonodromyResult {
  Matrix2 m{};
  Matrix2 dm_dz{};
  int steps = 0;
  bool overflow = false;  // some entry exceeded 1e300
};

enum class StepAccuracy { Coarse, Fine };

// Coarse: max(256, 16 w) with w = sqrt(max |q|). Fine: sized for ~1e-12
// RK4 phase error, at least 4096.
int default_steps(Complex z, double n, const DampingProfile& profile, StepAccuracy accuracy);

// Fundamental matrix of v'' = (z b + z^2 + 4 pi^2 n^2) v over [-1/2, 1/2] by
// classical RK4 on a grid whose nodes include every jump of b.
MonodromyResult monodromy_matrix(Complex z, double n, const DampingProfile& profile, int steps);

struct Characteristic {
  Complex f, df_dz;
};

// Periodic: 2 - tr M. Dirichlet: M12. Neumann: M21. steps = 0 picks Fine.
Characteristic characteristic(Complex z, double n, const DampingProfile& profile,
                              Geometry geometry, int steps = 0);

struct EigenSolution {
  Complex z;
  double n = 0.0;
  int multiplicity = 1;
  double residual = 0.0;
  int newton_iterations = 0;
  // Mode on the RK4 nodes, scaled to max |v| = 1. segment_ends[i] is the
  // index of the last node of segment i.
  std::vector<double> x;
  std::vector<Complex> mode;
  std::vector<int> segment_ends;
  double boundary_mismatch = 0.0;
};

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;
  int multiplicity = 1;
  bool reconstruct_mode = true;
  int steps = 0;  // 0 = Fine default at the current iterate
};

EigenSolution newton_refine(Complex z0, double n, const DampingProfile& profile, Geometry geometry,
                            const NewtonOptions& options = {});

struct Box {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
  Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
           z.imag() <= im_hi + slack;
  }
};

struct WindingResult {
  int count = 0;
  double raw = 0.0;
  Complex first_moment;   // sum of zeros
  Complex second_moment;  // sum of squared zeros
  int points = 0;
};

// Argument principle by trapezoid rule on F'/F, points doubled from
// `points` until the count is within 0.01 of a stable integer.
WindingResult winding_number(const Box& box, double n, const DampingProfile& profile,
                             Geometry geometry, int points = 4096, int steps = 0);

struct BoxOptions {
  int boundary_points = 4096;
  double dedup_tolerance = 1e-8;
  double cluster_tolerance = 1e-6;
  int max_depth = 48;
  bool reconstruct_modes = true;
};

// All zeros of F in the box for each n, sorted by (Im z, Re z, n).
std::vector<EigenSolution> spectrum_in_box(const Box& box, std::span<const double> n_values,
                                           const DampingProfile& profile, Geometry geometry,
                                           const BoxOptions& options = {});

// -1/2 (v, b v) / ||v||^2 on the stored mode.
double rayleigh_real_part(const EigenSolution& solution, const DampingProfile& profile);

}  // namespace dwsl
