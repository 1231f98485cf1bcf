// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>

#include "dwsl/error.hpp"
#include "dwsl/resolvent.hpp"

using namespace dwsl;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UsageError;
}

// For b = 0 the periodic FD operator is normal with eigenvalues
// (4 / dx^2) sin^2(pi k dx) + 4 pi^2 n^2 - s^2.
double fd_free_norm(double s, int n_max, int grid_n) {
  const double dx = 1.0 / grid_n;
  double best = INFINITY;
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k < grid_n; ++k) {
      const double sn = std::sin(kPi * k * dx);
      best = std::min(best, std::abs(4.0 * sn * sn / (dx * dx) + 4.0 * kPi * kPi * n * n - s * s));
    }
  return 1.0 / best;
}

Eigen::MatrixXcd dense_of(const PeriodicTridiagonal<Complex>& a) {
  const int n = static_cast<int>(a.diag.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) += a.diag[i];
    m(i, (i + 1) % n) += a.upper[i];
    m(i, (i - 1 + n) % n) += a.lower[i];
  }
  return m;
}

}  // namespace

TEST_SUITE("resolvent") {

TEST_CASE("mode operator assembly") {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto grid = make_fd_grid(strip, 64);
  const auto a = assemble_mode_operator(3.0, 1.0, grid);
  const double idx2 = 1.0 / (grid.dx * grid.dx);
  for (int j = 0; j < 64; ++j) {
    CHECK(std::abs(a.diag[j] - Complex(2.0 * idx2 + 4.0 * kPi * kPi - 9.0, 3.0 * grid.b[j])) <= 1e-9);
    CHECK(std::abs(a.upper[j] + idx2) <= 1e-9);
    CHECK(std::abs(a.lower[j] + idx2) <= 1e-9);
  }
  CHECK(code_of([&] { make_fd_grid(strip, 32); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { make_fd_grid(strip, 66); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("undamped finite-difference oracle") {
  for (double s : {0.5, 1.0, kTwoPi + 0.01, 9.0}) {
    const int nm = default_mode_cutoff(s);
    CAPTURE(s);
    CHECK(resolvent_norm(s, DampingProfile::zero(), nm, 256) ==
          doctest::Approx(fd_free_norm(s, nm, 256)).epsilon(1e-8));
  }
  CHECK(resolvent_norm(1.0, DampingProfile::zero()) == doctest::Approx(1.0).epsilon(1e-8));
  // s = 0 hits the constant mode: rounding leaves a tiny pivot or none.
  CHECK(resolvent_norm(0.0, DampingProfile::zero(), 8, 256) >= 1e10);
}

TEST_CASE("richardson recovers the continuum norm") {
  for (double s : {1.7, 12.3}) {
    ResolventOptions o;
    o.grid_n = 512;
    o.richardson = true;
    const auto v = resolvent_value(s, DampingProfile::zero(), o);
    CHECK(v.norm == doctest::Approx(free_resolvent_norm(s, default_mode_cutoff(s))).epsilon(1e-6));
  }
}

TEST_CASE("smallest singular value") {
  BandMatrix<Complex> d(3, 0, 0);
  d.at(0, 0) = 3.0;
  d.at(1, 1) = Complex(0.0, -4.0);
  d.at(2, 2) = 5.0;
  CHECK(smallest_singular_value(d) == doctest::Approx(3.0).epsilon(1e-10));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    BandMatrix<Complex> a(8, 2, 1);
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = std::max(0, i - 2); j <= std::min(7, i + 1); ++j) {
        const Complex v(g(rng), g(rng));
        a.at(i, j) = v;
        e(i, j) = v;
      }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e);
    CHECK(smallest_singular_value(a) == doctest::Approx(svd.singularValues()(7)).epsilon(1e-8));
  }

  const auto damped = assemble_mode_operator(7.0, 1.0, DampingProfile::strip(1.0, 0.25), 128);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense_of(damped));
  CHECK(smallest_singular_value(damped) == doctest::Approx(svd.singularValues()(127)).epsilon(1e-8));

  BandMatrix<Complex> z(2, 0, 0);
  z.at(0, 0) = 1.0;
  CHECK(smallest_singular_value(z) == 0.0);
}

TEST_CASE("constant damping decreases the norm with frequency") {
  const auto c = DampingProfile::constant(1.0);
  const double a = resolvent_norm(10.0, c, 0, 256);
  const double b = resolvent_norm(40.0, c, 0, 256);
  CHECK(b < a);
  // Constant b: every mode sits at distance >= s from the real axis.
  CHECK(a <= 1.0 / 10.0 + 1e-9);
}

TEST_CASE("grid refinement") {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const double coarse = resolvent_norm(20.0, strip, 0, 1024);
  const double fine = resolvent_norm(20.0, strip, 0, 2048);
  CHECK(std::abs(coarse - fine) <= 0.05 * fine);
}

TEST_CASE("mode cutoff") {
  CHECK(default_mode_cutoff(1.0) == 9);
  CHECK(default_mode_cutoff(kTwoPi * 3.5) == 12);
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const double base = resolvent_norm(15.0, strip, 6, 256);
  CHECK(resolvent_norm(15.0, strip, 12, 256) >= base);
  CHECK(code_of([&] { resolvent_norm(30.0, strip, 3, 256); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("scan and fit") {
  const auto grid = offset_grid(1.0, 60.0, 16);
  REQUIRE(grid.size() == 16);
  CHECK(grid.front() > 1.0);
  CHECK(grid.back() < 60.0);
  ResolventOptions o;
  o.grid_n = 256;
  const auto scan = scan_and_fit(DampingProfile::constant(1.0), grid, {1.0, 60.0}, o);
  CHECK(scan.norms.size() == 16);
  CHECK(scan.fitted_exponent < 0.0);
  CHECK(code_of([&] { scan_and_fit(DampingProfile::constant(1.0), grid, {1.0, 5.0}, o); }) ==
        ErrorCode::FitUnstable);
  CHECK(code_of([] { offset_grid(2.0, 1.0, 4); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("free oracle") {
  // Nearest lattice value 4 pi^2 to s^2 = 36.
  CHECK(free_resolvent_norm(6.0, 9) == doctest::Approx(1.0 / std::abs(36.0 - 4.0 * kPi * kPi)));
  CHECK(free_resolvent_norm(1.0, 9) == doctest::Approx(1.0));
}

TEST_CASE("thread count does not change values") {
  const auto grid = offset_grid(5.0, 30.0, 6);
  ResolventOptions o;
  o.grid_n = 256;
  setenv("DWSL_THREADS", "1", 1);
  const auto one = scan_and_fit(DampingProfile::strip(1.0, 0.25), grid, {5.0, 30.0}, o);
  setenv("DWSL_THREADS", "3", 1);
  const auto three = scan_and_fit(DampingProfile::strip(1.0, 0.25), grid, {5.0, 30.0}, o);
  unsetenv("DWSL_THREADS");
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(one.norms[i] == three.norms[i]);
}

}
