// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dwsl {

// b = strength on half_width < |x| <= 1/2, zero inside.
struct StripDamping {
  double strength = 1.0;
  double half_width = 0.25;
};

// b = amplitude * exp(-t^{-alpha}), t = (|x| - half_width) / (1/2 - half_width).
struct SmoothExpDamping {
  double alpha = 1.0;
  double half_width = 0.25;
  double amplitude = 1.0;
};

struct ConstantDamping {
  double value = 0.0;
};

// Values at x_j = -1/2 + j/N, periodic linear interpolation.
struct SampledDamping {
  std::vector<double> values;
};

class DampingProfile {
 public:
  using Kind = std::variant<StripDamping, SmoothExpDamping, ConstantDamping, SampledDamping>;

  DampingProfile() : kind_(ConstantDamping{0.0}) {}
  explicit DampingProfile(Kind kind);

  static DampingProfile strip(double strength, double half_width);
  static DampingProfile smooth_exp(double alpha, double half_width, double amplitude);
  static DampingProfile constant(double value);
  static DampingProfile sampled(std::vector<double> values);
  static DampingProfile zero() { return constant(0.0); }

  const Kind& kind() const { return kind_; }
  std::string_view kind_name() const;

  // x is reduced to [-1/2, 1/2) first.
  double operator()(double x) const;
  double derivative(double x) const;
  // One-sided limit (side > 0: from the right). Differs from operator()
  // only at jumps.
  double limit(double x, int side) const;

  double max_value() const;
  double min_value() const;
  bool is_zero() const { return max_value() == 0.0; }
  bool is_even() const;

  // Jump locations in [-1/2, 1/2); integrators and grids must align to them.
  std::vector<double> jumps() const;
  // Largest g with b = 0 on |x| <= g, or -1 if b > 0 at x = 0.
  double undamped_half_width() const;

  bool operator==(const DampingProfile& other) const;

 private:
  Kind kind_;
};

double eval_damping(const DampingProfile& profile, double x);

struct GradientCondition {
  bool holds = false;
  bool discontinuous = false;
  double constant_estimate = 0.0;
  double refined_estimate = 0.0;
};

// max |b'| / b^{1-eps} over {b > 0}, on grid_size and 2 * grid_size cell
// centres. Strip profiles report holds = false without raising.
GradientCondition check_gradient_condition(const DampingProfile& profile, double eps,
                                           int grid_size);

std::string to_config(const DampingProfile& profile);
DampingProfile profile_from_config(std::string_view text);
DampingProfile profile_from_section(const std::map<std::string, std::string>& section);

}  // namespace dwsl
