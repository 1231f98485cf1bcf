// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "dwsl/damping.hpp"

namespace dwsl {

enum class CutoffShape { Bump, Cosine, Constant };

// chi(x) sampled on x_j = -1/2 + j/(samples - 1), with its analytic second
// derivative and the Simpson norms over one period.
struct Cutoff {
  CutoffShape shape = CutoffShape::Bump;
  double support = 0.0;  // chi = 0 for |x| >= support
  std::vector<double> x;
  std::vector<double> samples;
  std::vector<double> second_derivative;
  double norm_l2 = 0.0;
  double norm_d2_l2 = 0.0;
};

inline constexpr int kDefaultCutoffSamples = 8193;

// 1 on |x| <= support/2, smooth step to 0 on [support/2, support].
Cutoff bump_cutoff(double support, int samples = kDefaultCutoffSamples);
// cos(pi x / (2 support)) on |x| <= support. Only C^0 at the edge.
Cutoff cosine_cutoff(double support, int samples = kDefaultCutoffSamples);
// chi = 1 everywhere.
Cutoff constant_cutoff(int samples = kDefaultCutoffSamples);

// Bump with support = g - margin, g the undamped half-width of the profile.
// b = 0 gives the constant cutoff.
Cutoff build_cutoff(const DampingProfile& profile, double margin,
                    int samples = kDefaultCutoffSamples);

// max |b chi| over the grid.
double support_overlap(const Cutoff& cutoff, const DampingProfile& profile);

// ||P(i s) phi|| / ||phi|| for phi = chi(x) e^{2 pi i n y}, s = 2 pi n, by
// Simpson on the full residual -chi'' + (2 pi n)^2 chi + z^2 chi + z b chi.
double quasimode_ratio(int n, const Cutoff& cutoff, const DampingProfile& profile);

// ||chi|| / ||chi''||; a lower bound for ||P(2 pi i n)^{-1}||.
double lower_bound_constant(const Cutoff& cutoff);

struct QuasimodeRow {
  int n = 0;
  double frequency = 0.0;
  double ratio = 0.0;
  double lower_bound = 0.0;
};

std::vector<QuasimodeRow> quasimode_table(std::span<const int> n_values, const Cutoff& cutoff,
                                          const DampingProfile& profile);

}  // namespace dwsl
