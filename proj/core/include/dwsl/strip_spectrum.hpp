// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dwsl/types.hpp"

namespace dwsl {

struct BranchParams {
  double strength = 1.0;    // damping value outside the strip
  double half_width = 0.25;
  Parity parity = Parity::Even;
  int m = 0;
  // Vertical index; unset means round(1/(2 pi h)) on the torus.
  std::optional<double> n;

  double outer_half_width() const { return 0.5 - half_width; }
};

struct QuantizationRoot {
  double h = 0.0;
  double n = 0.0;
  Complex k, k_damped;  // k and k'
  Complex energy;       // E = (hk)^2
  Complex zeta, zeta_tilde;
  Complex coupling;     // B = strength * (1 + h zeta_tilde)
  Complex z;            // i (1/h + zeta_tilde)
  double residual = 0.0;
  int newton_iterations = 0;
  int continuation_steps = 0;
};

struct Wavevectors {
  Complex k, k_damped;
};

Wavevectors wavevectors(Complex energy, double h, Complex coupling);

// F(k) of the even or odd matching condition, with k' rebuilt from (hk)^2.
Complex quantization_residual(Complex k, double h, Complex coupling, const BranchParams& params);

// Solves at a single h by continuation in h from the small-h asymptotic seed.
QuantizationRoot solve_branch_at_h(const BranchParams& params, double h);

double asymptotic_im_zeta(const BranchParams& params, double h);

// |Re z| (Im z)^{3/2}
double scaling_diagnostic(Complex z);

struct BranchPoint {
  QuantizationRoot root;
  double asymptotic_im_zeta = 0.0;
  double scaling = 0.0;
};

// h_list must be strictly descending; each root seeds the next.
std::vector<BranchPoint> branch(const BranchParams& params, std::span<const double> h_list);

double default_vertical_index(double h);

struct ModeSamples {
  std::vector<double> x;
  std::vector<Complex> v;
};

Complex mode_value(const QuantizationRoot& root, const BranchParams& params, double x);
Complex mode_derivative(const QuantizationRoot& root, const BranchParams& params, double x);
ModeSamples mode_profile(const QuantizationRoot& root, const BranchParams& params, int samples);

// Relative mismatch of v and v' across x = half_width.
double junction_mismatch(const QuantizationRoot& root, const BranchParams& params);

// -1/2 (v, b v) / ||v||^2 by composite Simpson on each smooth piece.
double rayleigh_real_part(const QuantizationRoot& root, const BranchParams& params,
                          int points_per_piece = 4097);

// Square with Dirichlet (odd states) or Neumann (even states); n in N/2.
QuantizationRoot square_spectrum(const BranchParams& params, double h, Boundary bc);

}  // namespace dwsl
