// SPDX-License-Identifier: Apache-2.0
#include "dwsl/quasimode.hpp"

#include <cmath>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/parallel.hpp"
#include "dwsl/quadrature.hpp"
#include "dwsl/types.hpp"

namespace dwsl {
namespace {

// f(u) = exp(-1/u) and its first two derivatives, zero for u <= 0.
struct Flat {
  double f, d1, d2;
};

Flat flat(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  const double f = std::exp(-1.0 / u);
  const double u2 = u * u;
  return {f, f / u2, f * (1.0 / (u2 * u2) - 2.0 / (u2 * u))};
}

// S(t) = f(1-t) / (f(t) + f(1-t)): 1 at t <= 0, 0 at t >= 1.
void smooth_step(double t, double& s, double& s2) {
  if (t <= 0.0) {
    s = 1.0;
    s2 = 0.0;
    return;
  }
  if (t >= 1.0) {
    s = 0.0;
    s2 = 0.0;
    return;
  }
  Flat p = flat(t), q = flat(1.0 - t);
  const double g = q.f, g1 = -q.d1, g2 = q.d2;
  const double d = g + p.f, d1 = g1 + p.d1, d2 = g2 + p.d2;
  s = g / d;
  s2 = (g2 * d - g * d2) / (d * d) - 2.0 * d1 * (g1 * d - g * d1) / (d * d * d);
}

Cutoff make_grid(CutoffShape shape, double support, int samples) {
  if (samples < 3 || samples % 2 == 0)
    raise(ErrorCode::InvalidArgument, "cutoff samples must be odd and >= 3");
  Cutoff c;
  c.shape = shape;
  c.support = support;
  c.x.resize(samples);
  c.samples.assign(samples, 0.0);
  c.second_derivative.assign(samples, 0.0);
  const double dx = 1.0 / (samples - 1);
  for (int j = 0; j < samples; ++j) c.x[j] = -0.5 + j * dx;
  return c;
}

void finish_norms(Cutoff& c) {
  const double dx = 1.0 / (c.x.size() - 1);
  std::vector<double> a(c.x.size()), b(c.x.size());
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    a[j] = c.samples[j] * c.samples[j];
    b[j] = c.second_derivative[j] * c.second_derivative[j];
  }
  c.norm_l2 = std::sqrt(simpson<double>(a, dx));
  c.norm_d2_l2 = std::sqrt(simpson<double>(b, dx));
}

void check_support(double support) {
  if (!(support > 0.0 && support <= 0.5))
    raise(ErrorCode::InvalidArgument, "cutoff support must lie in (0, 1/2], got " +
                                          format_double(support));
}

}  // namespace

Cutoff bump_cutoff(double support, int samples) {
  check_support(support);
  Cutoff c = make_grid(CutoffShape::Bump, support, samples);
  const double a = 0.5 * support;
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    double s, s2;
    smooth_step((std::abs(c.x[j]) - a) / a, s, s2);
    c.samples[j] = s;
    c.second_derivative[j] = s2 / (a * a);
  }
  finish_norms(c);
  return c;
}

Cutoff cosine_cutoff(double support, int samples) {
  check_support(support);
  Cutoff c = make_grid(CutoffShape::Cosine, support, samples);
  const double w = kPi / (2.0 * support);
  for (std::size_t j = 0; j < c.x.size(); ++j) {
    if (std::abs(c.x[j]) >= support) continue;
    c.samples[j] = std::cos(w * c.x[j]);
    c.second_derivative[j] = -w * w * c.samples[j];
  }
  finish_norms(c);
  return c;
}

Cutoff constant_cutoff(int samples) {
  Cutoff c = make_grid(CutoffShape::Constant, 0.5, samples);
  c.samples.assign(c.x.size(), 1.0);
  finish_norms(c);
  return c;
}

Cutoff build_cutoff(const DampingProfile& profile, double margin, int samples) {
  if (profile.is_zero()) return constant_cutoff(samples);
  if (!(margin > 0.0)) raise(ErrorCode::InvalidArgument, "cutoff margin must be positive");
  const double g = profile.undamped_half_width();
  if (g <= 0.0 || margin >= g)
    raise(ErrorCode::NoGap, "no undamped strip of half-width > " + format_double(margin) +
                                " (undamped half-width " + format_double(g) + ")");
  return bump_cutoff(g - margin, samples);
}

double support_overlap(const Cutoff& cutoff, const DampingProfile& profile) {
  double worst = 0.0;
  for (std::size_t j = 0; j < cutoff.x.size(); ++j)
    if (cutoff.samples[j] != 0.0)
      worst = std::max(worst, std::abs(profile(cutoff.x[j]) * cutoff.samples[j]));
  return worst;
}

double quasimode_ratio(int n, const Cutoff& cutoff, const DampingProfile& profile) {
  if (n < 1) raise(ErrorCode::InvalidArgument, "quasimode index n must be >= 1");
  if (double o = support_overlap(cutoff, profile); o > 0.0)
    raise(ErrorCode::SupportOverlap, "b * chi reaches " + format_double(o) + " on the grid");
  const double s = kTwoPi * n;
  const Complex z{0.0, s};
  const std::size_t count = cutoff.x.size();
  std::vector<double> res(count), phi(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double chi = cutoff.samples[j];
    Complex r = -cutoff.second_derivative[j] + (s * s) * chi + z * z * chi +
                z * profile(cutoff.x[j]) * chi;
    res[j] = std::norm(r);
    phi[j] = chi * chi;
  }
  const double dx = 1.0 / (count - 1);
  return std::sqrt(simpson<double>(res, dx) / simpson<double>(phi, dx));
}

double lower_bound_constant(const Cutoff& cutoff) {
  if (cutoff.norm_d2_l2 == 0.0)
    raise(ErrorCode::ExactEigenmode, "chi'' = 0: the quasimode is an exact eigenfunction");
  return cutoff.norm_l2 / cutoff.norm_d2_l2;
}

std::vector<QuasimodeRow> quasimode_table(std::span<const int> n_values, const Cutoff& cutoff,
                                          const DampingProfile& profile) {
  std::vector<QuasimodeRow> rows(n_values.size());
  const double c = cutoff.norm_d2_l2 > 0.0 ? lower_bound_constant(cutoff) : INFINITY;
  parallel_for(rows.size(), [&](std::size_t i) {
    const int n = n_values[i];
    rows[i] = {n, kTwoPi * n, quasimode_ratio(n, cutoff, profile), c};
  });
  return rows;
}

}  // namespace dwsl
