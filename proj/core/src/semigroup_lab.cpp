// SPDX-License-Identifier: Apache-2.0
#include "dwsl/semigroup_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/parallel.hpp"
#include "dwsl/quadrature.hpp"

namespace dwsl {
namespace {

Complex quadrature_coefficient(const DampingProfile& profile, int k) {
  const int count = (1 << 16) + 1;
  const double dx = 1.0 / (count - 1);
  std::vector<Complex> f(count);
  for (int j = 0; j < count; ++j) {
    const double x = -0.5 + j * dx;
    f[j] = std::sqrt(std::max(0.0, profile(x))) * std::polar(1.0, -kTwoPi * k * x);
  }
  return simpson<Complex>(f, dx);
}

DenseMatrix operator_p(const SystemBlock& blk, Complex z) {
  DenseMatrix p = blk.bb.scaled(z);
  for (int i = 0; i < blk.dim(); ++i) p(i, i) += blk.lambda[i] + z * z;
  return p;
}

// z - generator
DenseMatrix shifted(const SystemBlock& blk, Complex z) {
  DenseMatrix m = blk.generator.scaled(-1.0);
  for (int i = 0; i < m.rows(); ++i) m(i, i) += z;
  return m;
}

double distance_to(std::span<const Complex> spectrum, Complex z) {
  double d = std::numeric_limits<double>::infinity();
  for (Complex w : spectrum) d = std::min(d, std::abs(w - z));
  return d;
}

}  // namespace

Complex sqrt_damping_coefficient(const DampingProfile& profile, int k) {
  if (const auto* s = std::get_if<StripDamping>(&profile.kind())) {
    const double a = std::sqrt(s->strength);
    if (k == 0) return a * (1.0 - 2.0 * s->half_width);
    return -a * std::sin(kTwoPi * k * s->half_width) / (kPi * k);
  }
  if (const auto* c = std::get_if<ConstantDamping>(&profile.kind()))
    return k == 0 ? std::sqrt(c->value) : 0.0;
  return quadrature_coefficient(profile, k);
}

TruncatedSystem build_system(const DampingProfile& profile, int cutoff, bool compute_spectrum) {
  if (cutoff < 1) raise(ErrorCode::InvalidArgument, "freq_cutoff must be >= 1");
  TruncatedSystem sys;
  sys.cutoff = cutoff;
  sys.profile = profile;
  sys.continuum_b_norm = std::sqrt(std::max(0.0, profile.max_value()));
  // sqrt(b) is real, so the coefficient at -k is the conjugate of that at k.
  std::vector<Complex> coeff(2 * cutoff + 1);
  for (int k = 0; k <= 2 * cutoff; ++k) coeff[k] = sqrt_damping_coefficient(profile, k);
  auto g = [&](int k) { return k >= 0 ? coeff[k] : std::conj(coeff[-k]); };

  for (int n = -cutoff; n <= cutoff; ++n) {
    SystemBlock blk;
    blk.n = n;
    for (int m = -cutoff; m <= cutoff; ++m)
      if (m * m + n * n <= cutoff * cutoff) {
        blk.m.push_back(m);
        blk.lambda.push_back(4.0 * kPi * kPi * (m * m + n * n));
      }
    const int d = blk.dim();
    blk.b = DenseMatrix(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) blk.b(i, j) = g(blk.m[i] - blk.m[j]);
    blk.bb = blk.b * blk.b.adjoint();
    blk.generator = DenseMatrix(2 * d, 2 * d);
    for (int i = 0; i < d; ++i) {
      blk.generator(i, d + i) = 1.0;
      blk.generator(d + i, i) = -blk.lambda[i];
      for (int j = 0; j < d; ++j) blk.generator(d + i, d + j) = -blk.bb(i, j);
    }
    sys.dim += 2 * d;
    sys.blocks.push_back(std::move(blk));
  }
  std::vector<double> norms(sys.blocks.size());
  parallel_for(sys.blocks.size(), [&](std::size_t i) {
    auto& blk = sys.blocks[i];
    norms[i] = blk.dim() > 0 ? spectral_norm(blk.b) : 0.0;
    if (compute_spectrum) blk.spectrum = eigenvalues(blk.generator);
  });
  for (double v : norms) sys.b_norm = std::max(sys.b_norm, v);
  sys.has_spectrum = compute_spectrum;
  return sys;
}

std::vector<Complex> system_spectrum(const TruncatedSystem& sys) {
  std::vector<Complex> all;
  for (const auto& blk : sys.blocks) {
    if (sys.has_spectrum) {
      all.insert(all.end(), blk.spectrum.begin(), blk.spectrum.end());
    } else {
      auto e = eigenvalues(blk.generator);
      all.insert(all.end(), e.begin(), e.end());
    }
  }
  return all;
}

LocalizationReport check_spectrum_localization(const TruncatedSystem& sys, double tol) {
  LocalizationReport r;
  r.b_norm_sq = sys.b_norm * sys.b_norm;
  r.continuum_b_norm_sq = sys.continuum_b_norm * sys.continuum_b_norm;
  r.truncated_bound_binding = sys.b_norm < sys.continuum_b_norm;
  const auto spectrum = system_spectrum(sys);
  r.eigenvalue_count = spectrum.size();
  for (Complex z : spectrum) {
    const bool real = std::abs(z.imag()) <= tol;
    const double lo = real ? -r.b_norm_sq : -0.5 * r.b_norm_sq;
    const double excess = std::max({z.real() - 0.0, lo - z.real(), 0.0});
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.worst_eigenvalue = z;
    }
  }
  if (sys.profile.is_even()) {
    for (const auto& blk : sys.blocks) {
      const auto& e = sys.has_spectrum ? blk.spectrum : eigenvalues(blk.generator);
      for (Complex z : e) r.conjugation_defect = std::max(r.conjugation_defect, distance_to(e, std::conj(z)));
    }
  }

  // ker A x {0} lies in the kernel exactly; equal dimensions give equality.
  std::vector<int> kernel(sys.blocks.size());
  std::vector<char> inclusion(sys.blocks.size(), 1);
  parallel_for(sys.blocks.size(), [&](std::size_t b) {
    const auto& blk = sys.blocks[b];
    auto sv = singular_values(blk.generator);
    const double top = sv.empty() ? 0.0 : sv.front();
    for (double s : sv)
      if (s <= 1e-9 * top) ++kernel[b];
    const int d = blk.dim();
    for (int i = 0; i < d; ++i) {
      if (blk.lambda[i] != 0.0) continue;
      for (int row = 0; row < 2 * d; ++row)
        if (std::abs(blk.generator(row, i)) > tol) inclusion[b] = 0;
    }
  });
  bool included = true;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    r.kernel_dim += kernel[b];
    included = included && inclusion[b];
    for (double l : sys.blocks[b].lambda)
      if (l == 0.0) ++r.laplacian_kernel;
  }
  r.kernel_ok = included && r.kernel_dim == r.laplacian_kernel;
  r.holds = r.worst_excess <= tol && r.kernel_ok;
  if (r.worst_excess > tol)
    raise(ErrorCode::LocalizationViolation,
          "eigenvalue " + format_double(r.worst_eigenvalue.real()) + " + " +
              format_double(r.worst_eigenvalue.imag()) + "i lies " + format_double(r.worst_excess) +
              " outside the localization region");
  return r;
}

double check_resolvent_identity(const TruncatedSystem& sys, Complex z) {
  double worst = 0.0, scale = 0.0;
  for (const auto& blk : sys.blocks) {
    const auto& e = sys.has_spectrum ? blk.spectrum : eigenvalues(blk.generator);
    if (double dist = distance_to(e, z); dist < 1e-6)
      raise(ErrorCode::NearSpectrum, "z is " + format_double(dist) + " from an eigenvalue");
  }
  for (const auto& blk : sys.blocks) {
    const int d = blk.dim();
    DenseMatrix direct = DenseLU(shifted(blk, z)).inverse();
    DenseMatrix pinv = DenseLU(operator_p(blk, z)).inverse();
    DenseMatrix q = blk.bb;
    for (int i = 0; i < d; ++i) q(i, i) += z;
    DenseMatrix top_left = pinv * q;
    for (int i = 0; i < 2 * d; ++i)
      for (int j = 0; j < 2 * d; ++j) {
        Complex formula;
        if (i < d && j < d) formula = top_left(i, j);
        else if (i < d) formula = pinv(i, j - d);
        else if (j < d) formula = z * top_left(i - d, j) - (i - d == j ? 1.0 : 0.0);
        else formula = z * pinv(i - d, j - d);
        worst = std::max(worst, std::abs(formula - direct(i, j)));
        scale = std::max(scale, std::abs(direct(i, j)));
      }
  }
  return scale > 0.0 ? worst / scale : worst;
}

SandwichReport check_sandwich(const TruncatedSystem& sys, std::span<const double> s_list) {
  SandwichReport rep;
  rep.rows.resize(s_list.size());
  parallel_for(s_list.size(), [&](std::size_t k) {
    const double s = s_list[k];
    if (s == 0.0) raise(ErrorCode::InvalidArgument, "sandwich needs s != 0");
    const Complex z{0.0, s};
    double gen = 0.0, pn = 0.0;
    for (const auto& blk : sys.blocks) {
      const int d = blk.dim();
      DenseMatrix r = DenseLU(shifted(blk, z)).inverse();
      for (int i = 0; i < d; ++i) {
        const double w = std::sqrt(1.0 + blk.lambda[i]);
        for (int j = 0; j < 2 * d; ++j) r(i, j) *= w;
        for (int j = 0; j < 2 * d; ++j) r(j, i) /= w;
      }
      gen = std::max(gen, spectral_norm(r));
      pn = std::max(pn, spectral_norm(DenseLU(operator_p(blk, z)).inverse()));
    }
    SandwichRow row;
    row.s = s;
    row.generator_norm = gen;
    row.scaled_p_norm = std::abs(s) * pn;
    row.constant = std::max(row.scaled_p_norm / gen, gen / (1.0 + row.scaled_p_norm));
    rep.rows[k] = row;
  });
  for (const auto& row : rep.rows) rep.constant = std::max(rep.constant, row.constant);
  return rep;
}

GapReport check_gap_region(const TruncatedSystem& sys, double alpha, double eps) {
  if (!(alpha > 0.0)) raise(ErrorCode::InvalidArgument, "alpha must be positive");
  GapReport rep;
  rep.min_product = std::numeric_limits<double>::infinity();
  const double power = 1.0 / alpha - eps;
  for (const auto& blk : sys.blocks) {
    if (blk.n < 1) continue;
    const auto& e = sys.has_spectrum ? blk.spectrum : eigenvalues(blk.generator);
    bool found = false;
    GapRow row;
    row.n = blk.n;
    for (Complex z : e) {
      if (z.imag() <= 1e-9) continue;
      if (!found || z.real() > row.z.real()) row.z = z;
      found = true;
    }
    if (!found) continue;
    row.product = std::abs(row.z.real()) * std::pow(row.z.imag(), power);
    rep.max_product = std::max(rep.max_product, row.product);
    rep.min_product = std::min(rep.min_product, row.product);
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) rep.min_product = 0.0;
  return rep;
}

}  // namespace dwsl
