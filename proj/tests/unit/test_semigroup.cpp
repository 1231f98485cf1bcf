// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "dwsl/error.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/semigroup_lab.hpp"

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

double distance(const std::vector<Complex>& set, Complex z) {
  double d = INFINITY;
  for (Complex w : set) d = std::min(d, std::abs(w - z));
  return d;
}

const SystemBlock& block(const TruncatedSystem& sys, int n) {
  return *std::find_if(sys.blocks.begin(), sys.blocks.end(), [&](const auto& b) { return b.n == n; });
}

// Least damped eigenvalue with 0 < Im z < im_max.
Complex least_damped(const SystemBlock& blk, double im_max) {
  Complex best(-INFINITY, 0.0);
  for (Complex z : blk.spectrum)
    if (z.imag() > 1e-9 && z.imag() < im_max && z.real() > best.real()) best = z;
  return best;
}

}  // namespace

TEST_SUITE("semigroup_lab") {

TEST_CASE("block structure") {
  const auto sys = build_system(DampingProfile::strip(1.0, 0.25), 4);
  REQUIRE(sys.blocks.size() == 9);
  int dim = 0;
  for (const auto& blk : sys.blocks) {
    for (std::size_t i = 0; i < blk.m.size(); ++i) {
      CHECK(blk.m[i] * blk.m[i] + blk.n * blk.n <= 16);
      CHECK(blk.lambda[i] == doctest::Approx(4.0 * kPi * kPi * (blk.m[i] * blk.m[i] + blk.n * blk.n)));
    }
    for (int i = 0; i < blk.dim(); ++i)
      for (int j = 0; j < blk.dim(); ++j) {
        CHECK(std::abs(blk.b(i, j) - std::conj(blk.b(j, i))) <= 1e-15);
        CHECK(std::abs(blk.bb(i, j) - std::conj(blk.bb(j, i))) <= 1e-13);
      }
    dim += 2 * blk.dim();
  }
  CHECK(sys.dim == dim);
  CHECK(block(sys, 4).dim() == 1);
  CHECK(code_of([] { build_system(DampingProfile::zero(), 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("undamped spectrum") {
  const auto sys = build_system(DampingProfile::zero(), 6);
  for (const auto& blk : sys.blocks)
    for (std::size_t i = 0; i < blk.m.size(); ++i) {
      const double w = std::sqrt(blk.lambda[i]);
      CHECK(distance(blk.spectrum, Complex(0.0, w)) <= 1e-9 * std::max(1.0, w));
      CHECK(distance(blk.spectrum, Complex(0.0, -w)) <= 1e-9 * std::max(1.0, w));
    }
  CHECK(sys.b_norm == 0.0);
}

TEST_CASE("constant damping spectrum") {
  const double c = 0.6;
  const auto sys = build_system(DampingProfile::constant(c), 5);
  CHECK(sys.b_norm == doctest::Approx(std::sqrt(c)));
  for (const auto& blk : sys.blocks)
    for (double l : blk.lambda) {
      const Complex root = std::sqrt(Complex(c * c / 4.0 - l, 0.0));
      for (Complex z : {-c / 2.0 + root, -c / 2.0 - root})
        CHECK(distance(blk.spectrum, z) <= 1e-8 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("block spectrum agrees with a dense eigensolver") {
  const auto sys = build_system(DampingProfile::smooth_exp(1.0, 0.25, 1.0), 6);
  const auto& blk = block(sys, 2);
  const int d = 2 * blk.dim();
  Eigen::MatrixXcd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = blk.generator(i, j);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g, false);
  for (int i = 0; i < d; ++i) CHECK(distance(blk.spectrum, es.eigenvalues()(i)) <= 1e-8);
}

TEST_CASE("truncated spectrum converges to the monodromy root") {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto exact = newton_refine(Complex(-0.25, 6.29), 1.0, strip, Geometry::torus());
  std::vector<double> errors;
  for (int cutoff : {8, 16, 32}) {
    const auto sys = build_system(strip, cutoff);
    errors.push_back(std::abs(least_damped(block(sys, 1), 8.0) - exact.z));
  }
  CHECK(errors[1] < 0.6 * errors[0]);
  CHECK(errors[2] < 0.6 * errors[1]);
  CHECK(errors[2] <= 2e-3);
}

TEST_CASE("localization and kernel") {
  for (const auto& p : {DampingProfile::zero(), DampingProfile::constant(1.0), DampingProfile::strip(1.0, 0.25),
                        DampingProfile::smooth_exp(1.0, 0.25, 2.0)}) {
    const auto sys = build_system(p, 8);
    const auto r = check_spectrum_localization(sys);
    CAPTURE(p.kind_name());
    CHECK(r.holds);
    CHECK(r.kernel_ok);
    CHECK(r.kernel_dim == 1);
    CHECK(r.laplacian_kernel == 1);
    CHECK(r.conjugation_defect <= 1e-8);
    CHECK(r.eigenvalue_count == static_cast<std::size_t>(sys.dim));
  }
}

TEST_CASE("resolvent identity") {
  const auto zero = build_system(DampingProfile::zero(), 8);
  CHECK(check_resolvent_identity(zero, Complex(1.0, 1.0)) <= 1e-11);
  const auto strip = build_system(DampingProfile::strip(1.0, 0.25), 8);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-0.4, -0.01), im(1.0, 50.0);
  for (int i = 0; i < 10; ++i) CHECK(check_resolvent_identity(strip, Complex(re(rng), im(rng))) <= 1e-10);
  CHECK(code_of([&] { check_resolvent_identity(zero, Complex(0.0, kTwoPi) + 1e-8); }) ==
        ErrorCode::NearSpectrum);
}

TEST_CASE("sandwich constant") {
  const auto zero = build_system(DampingProfile::zero(), 8);
  // Bounded both away from and right next to the eigenfrequencies.
  const std::vector<double> s = {3.0, kTwoPi + 1e-3, kTwoPi * std::sqrt(2.0) - 1e-4};
  const auto r = check_sandwich(zero, s);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[1].generator_norm > 100.0 * r.rows[0].generator_norm);
  CHECK(r.constant <= 10.0);
  CHECK(r.constant >= 0.5);
  const auto strip = build_system(DampingProfile::strip(1.0, 0.25), 12);
  const std::vector<double> s2 = {5.0, 25.0, 50.0};
  CHECK(check_sandwich(strip, s2).constant <= 10.0);
  const std::vector<double> bad = {0.0};
  CHECK(code_of([&] { check_sandwich(zero, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("gap region") {
  const auto zero = check_gap_region(build_system(DampingProfile::zero(), 8), 2.0 / 3.0);
  CHECK(zero.max_product <= 1e-9);
  const double c = 1.0;
  const auto constant = check_gap_region(build_system(DampingProfile::constant(c), 8), 2.0 / 3.0);
  REQUIRE(!constant.rows.empty());
  for (const auto& row : constant.rows) CHECK(row.z.real() == doctest::Approx(-c / 2.0).epsilon(1e-8));
  CHECK(constant.max_product > constant.min_product);
  const auto strip = check_gap_region(build_system(DampingProfile::strip(1.0, 0.25), 8), 2.0 / 3.0);
  CHECK(strip.rows.size() == 8);
  for (const auto& row : strip.rows) {
    CHECK(row.z.real() < 0.0);
    CHECK(row.product > 0.0);
  }
  CHECK(code_of([] { check_gap_region(build_system(DampingProfile::zero(), 2), 0.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("square root coefficients") {
  const auto strip = DampingProfile::strip(2.0, 0.2);
  // Sampled copy of the strip, only the quadrature path applies.
  std::vector<double> values(1000);
  for (int j = 0; j < 1000; ++j) values[j] = strip(-0.5 + j / 1000.0);
  const auto sampled = DampingProfile::sampled(values);
  for (int k : {0, 1, 2, 5}) {
    const Complex exact = sqrt_damping_coefficient(strip, k);
    CHECK(std::abs(sqrt_damping_coefficient(sampled, k) - exact) <= 2e-3);
  }
  CHECK(std::abs(sqrt_damping_coefficient(strip, 0) - std::sqrt(2.0) * 0.6) <= 1e-15);
  CHECK(std::abs(sqrt_damping_coefficient(DampingProfile::constant(4.0), 0) - 2.0) <= 1e-15);
  CHECK(sqrt_damping_coefficient(DampingProfile::constant(4.0), 3) == 0.0);
  const auto smooth = DampingProfile::smooth_exp(1.0, 0.25, 1.0);
  CHECK(std::abs(sqrt_damping_coefficient(smooth, 1).imag()) <= 1e-12);
}

}
