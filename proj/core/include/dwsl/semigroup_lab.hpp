// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "dwsl/damping.hpp"
#include "dwsl/dense.hpp"
#include "dwsl/types.hpp"

namespace dwsl {

// Restriction to the vertical index n: basis e^{2 pi i (m x + n y)} with
// m^2 + n^2 <= cutoff^2. Multiplication by b(x) never couples different n.
struct SystemBlock {
  int n = 0;
  std::vector<int> m;
  std::vector<double> lambda;  // 4 pi^2 (m^2 + n^2)
  DenseMatrix b;               // Fourier matrix of sqrt(b), Hermitian
  DenseMatrix bb;              // B B*
  DenseMatrix generator;       // [[0, I], [-A, -B B*]]
  std::vector<Complex> spectrum;
  int dim() const { return static_cast<int>(m.size()); }
};

struct TruncatedSystem {
  int cutoff = 0;
  DampingProfile profile;
  std::vector<SystemBlock> blocks;  // n = -cutoff .. cutoff
  int dim = 0;                      // size of the full generator
  double b_norm = 0.0;              // ||B*|| of the truncation
  double continuum_b_norm = 0.0;    // sup sqrt(b)
  bool has_spectrum = false;
};

// k-th Fourier coefficient of sqrt(b): closed form for Strip and Constant,
// Simpson on 2^16 + 1 points otherwise.
Complex sqrt_damping_coefficient(const DampingProfile& profile, int k);

TruncatedSystem build_system(const DampingProfile& profile, int cutoff, bool compute_spectrum = true);

// Every generator eigenvalue, block by block in n order.
std::vector<Complex> system_spectrum(const TruncatedSystem& sys);

struct LocalizationReport {
  bool holds = false;
  double b_norm_sq = 0.0;
  double continuum_b_norm_sq = 0.0;
  bool truncated_bound_binding = false;  // ||B*|| < sup sqrt(b)
  double worst_excess = 0.0;             // largest distance outside the region
  Complex worst_eigenvalue;
  int kernel_dim = 0;        // dim ker of the generator
  int laplacian_kernel = 0;  // dim ker A
  bool kernel_ok = false;
  double conjugation_defect = 0.0;  // max distance of conj(z) to the spectrum, real b only
  std::size_t eigenvalue_count = 0;
};

// Sp in ((-||B*||^2 / 2, 0) + iR) U [-||B*||^2, 0] within tol, and
// ker = ker A x {0}. Raises LocalizationViolation when the region fails.
LocalizationReport check_spectrum_localization(const TruncatedSystem& sys, double tol = 1e-9);

// max entrywise |R - R'| / max |R| between the direct inverse of z - A and
// the block formula through P(z) = A + z B B* + z^2. NearSpectrum within 1e-6.
double check_resolvent_identity(const TruncatedSystem& sys, Complex z);

struct SandwichRow {
  double s = 0.0;
  double generator_norm = 0.0;  // ||(is - A)^{-1}|| in the energy space
  double scaled_p_norm = 0.0;   // |s| ||P(is)^{-1}||
  double constant = 0.0;        // smallest C for this s
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  double constant = 0.0;  // max over rows
};

// Energy norm ||(u, v)||^2 = ||(1 + A)^{1/2} u||^2 + ||v||^2.
SandwichReport check_sandwich(const TruncatedSystem& sys, std::span<const double> s_list);

struct GapRow {
  int n = 0;
  Complex z;             // least damped eigenvalue of the block with Im z > 0
  double product = 0.0;  // |Re z| (Im z)^{1/alpha - eps}
};

struct GapReport {
  std::vector<GapRow> rows;
  double max_product = 0.0;
  double min_product = 0.0;
};

// Least damped eigenvalue with Im z > 0 in every block n >= 1.
GapReport check_gap_region(const TruncatedSystem& sys, double alpha, double eps = 0.0);

}  // namespace dwsl
