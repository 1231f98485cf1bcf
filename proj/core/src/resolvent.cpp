// SPDX-License-Identifier: Apache-2.0
#include "dwsl/resolvent.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dwsl/config.hpp"
#include "dwsl/dense.hpp"
#include "dwsl/error.hpp"
#include "dwsl/parallel.hpp"

namespace dwsl {
namespace {

// Largest eigenvalue of the symmetric tridiagonal (alpha, beta) by Sturm
// bisection.
double top_eigenvalue(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t k = alpha.size();
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < k; ++i) {
    double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < k ? std::abs(beta[i]) : 0.0);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  // Number of eigenvalues below x.
  auto below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - (i > 0 ? b2 / d : 0.0);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(std::abs(hi), std::abs(lo)); ++it) {
    double mid = 0.5 * (lo + hi);
    if (below(mid) == static_cast<int>(k))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Lanczos with full reorthogonalisation on (A*A)^{-1}, applied as A^{-1} A^{-*}.
template <class Factor>
double inverse_iteration(const Factor& lu, int n, const SingularValueOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<Complex>> q;
  std::vector<Complex> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  double nx = vector_norm(x);
  for (auto& v : x) v /= nx;
  std::vector<double> alpha, beta;
  double theta_prev = 0.0;
  int stable = 0;
  const int limit = std::min(opt.max_iterations, n);
  for (int it = 0; it < limit; ++it) {
    q.push_back(x);
    std::vector<Complex> w = x;
    lu.solve_adjoint_in_place(w);
    lu.solve_in_place(w);
    for (const auto& v : w)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return 0.0;
    Complex a{};
    for (int i = 0; i < n; ++i) a += std::conj(x[i]) * w[i];
    alpha.push_back(a.real());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qk : q) {
        Complex c{};
        for (int i = 0; i < n; ++i) c += std::conj(qk[i]) * w[i];
        for (int i = 0; i < n; ++i) w[i] -= c * qk[i];
      }
    const double b = vector_norm(w);
    const double theta = top_eigenvalue(alpha, beta);
    if (!(theta > 0.0)) return 0.0;
    if (b <= 1e-14 * theta) return 1.0 / std::sqrt(theta);
    stable = (it > 0 && std::abs(theta - theta_prev) <= opt.tolerance * theta) ? stable + 1 : 0;
    if (stable >= 2) return 1.0 / std::sqrt(theta);
    theta_prev = theta;
    beta.push_back(b);
    for (int i = 0; i < n; ++i) x[i] = w[i] / b;
  }
  raise(ErrorCode::NoConvergence, "Lanczos for sigma_min stalled after " +
                                      std::to_string(limit) + " steps");
}

// sigma_min per n in [0, n_max] on one grid.
std::vector<double> mode_sigmas(double s, int n_max, const FdGrid& grid,
                                const SingularValueOptions& opt) {
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n)
    out[n] = smallest_singular_value(assemble_mode_operator(s, n, grid), opt);
  return out;
}

}  // namespace

PeriodicTridiagonal<Complex> assemble_mode_operator(double s, double n, const FdGrid& grid) {
  const int size = grid.size;
  const double inv = 1.0 / (grid.dx * grid.dx);
  const double shift = 4.0 * kPi * kPi * n * n - s * s;
  PeriodicTridiagonal<Complex> a;
  a.diag.resize(size);
  a.lower.assign(size, Complex(-inv, 0.0));
  a.upper.assign(size, Complex(-inv, 0.0));
  for (int j = 0; j < size; ++j) a.diag[j] = Complex(2.0 * inv + shift, s * grid.b[j]);
  return a;
}

PeriodicTridiagonal<Complex> assemble_mode_operator(double s, double n,
                                                    const DampingProfile& profile, int grid_n) {
  return assemble_mode_operator(s, n, make_fd_grid(profile, grid_n));
}

double smallest_singular_value(const PeriodicTridiagonal<Complex>& a,
                               const SingularValueOptions& options) {
  try {
    PeriodicTridiagonalLU<Complex> lu(a);
    return inverse_iteration(lu, a.size(), options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularFactorization) return 0.0;
    throw;
  }
}

double smallest_singular_value(const BandMatrix<Complex>& a, const SingularValueOptions& options) {
  try {
    BandLU<Complex> lu(a);
    return inverse_iteration(lu, a.size(), options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularFactorization) return 0.0;
    throw;
  }
}

int default_mode_cutoff(double s) { return static_cast<int>(std::ceil(std::abs(s) / kTwoPi)) + 8; }

ResolventValue resolvent_value(double s, const DampingProfile& profile,
                               const ResolventOptions& options) {
  const int n_max = options.n_max > 0 ? options.n_max : default_mode_cutoff(s);
  if (n_max < static_cast<int>(std::ceil(std::abs(s) / kTwoPi)) + 2)
    raise(ErrorCode::InvalidArgument, "n_max = " + std::to_string(n_max) +
                                          " is below ceil(s/(2 pi)) + 2 for s = " + format_double(s));
  std::vector<double> sig = mode_sigmas(s, n_max, make_fd_grid(profile, options.grid_n),
                                        options.singular);
  if (options.richardson) {
    std::vector<double> fine = mode_sigmas(s, n_max, make_fd_grid(profile, 2 * options.grid_n),
                                           options.singular);
    for (int n = 0; n <= n_max; ++n) sig[n] = std::max(0.0, (4.0 * fine[n] - sig[n]) / 3.0);
  }
  ResolventValue v;
  v.s = s;
  v.sigma_min = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n)
    if (sig[n] < v.sigma_min) {
      v.sigma_min = sig[n];
      v.argmax_n = n;
    }
  v.norm = v.sigma_min > 0.0 ? 1.0 / v.sigma_min : std::numeric_limits<double>::infinity();
  return v;
}

double resolvent_norm(double s, const DampingProfile& profile, int n_max, int grid_n) {
  ResolventOptions o;
  o.n_max = n_max;
  o.grid_n = grid_n;
  return resolvent_value(s, profile, o).norm;
}

ResolventScan scan_and_fit(const DampingProfile& profile, std::span<const double> s_grid,
                           std::pair<double, double> window, const ResolventOptions& options) {
  ResolventScan scan;
  scan.s_grid.assign(s_grid.begin(), s_grid.end());
  scan.norms.resize(s_grid.size());
  scan.argmax_n.resize(s_grid.size());
  scan.grid_n = options.grid_n;
  scan.window = window;
  std::vector<int> cutoffs(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t i) {
    ResolventValue v = resolvent_value(s_grid[i], profile, options);
    scan.norms[i] = v.norm;
    scan.argmax_n[i] = v.argmax_n;
    cutoffs[i] = options.n_max > 0 ? options.n_max : default_mode_cutoff(s_grid[i]);
  });
  for (int c : cutoffs) scan.n_max = std::max(scan.n_max, c);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const double s = s_grid[i];
    if (s < window.first || s > window.second || !(s > 0.0) || !std::isfinite(scan.norms[i]))
      continue;
    lx.push_back(std::log(s));
    ly.push_back(std::log(scan.norms[i]));
  }
  if (lx.size() < 5)
    raise(ErrorCode::FitUnstable, "fit window holds " + std::to_string(lx.size()) +
                                      " finite points, need 5");
  scan.fit = fit_line(lx, ly);
  scan.fitted_exponent = scan.fit.slope;
  return scan;
}

std::vector<double> offset_grid(double lo, double hi, int count) {
  if (count < 1 || !(hi > lo)) raise(ErrorCode::InvalidArgument, "offset_grid needs lo < hi, count >= 1");
  const double step = (hi - lo) / count;
  const double frac = 0.5 * (std::sqrt(5.0) - 1.0);
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = lo + (i + frac) * step;
  return s;
}

double free_resolvent_norm(double s, int n_max) {
  const double s2 = s * s;
  const double c = 4.0 * kPi * kPi;
  double best = std::numeric_limits<double>::infinity();
  const int m_top = static_cast<int>(std::ceil(std::abs(s) / kTwoPi)) + 1;
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_top; ++m) best = std::min(best, std::abs(c * (m * m + n * n) - s2));
  return best > 0.0 ? 1.0 / best : std::numeric_limits<double>::infinity();
}

}  // namespace dwsl
