// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dwsl/error.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/strip_spectrum.hpp"

using namespace dwsl;

namespace {

Complex det(const Matrix2& m) { return m[0] * m[3] - m[1] * m[2]; }

double max_diff(const Matrix2& a, const Matrix2& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Matrix2 mul(const Matrix2& a, const Matrix2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

// Propagator of v'' = w^2 v over length len.
Matrix2 free_block(Complex w, double len) {
  if (std::abs(w) < 1e-14) return {1.0, len, 0.0, 1.0};
  return {std::cosh(w * len), std::sinh(w * len) / w, w * std::sinh(w * len), std::cosh(w * len)};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UsageError;
}

}  // namespace

TEST_SUITE("monodromy") {

TEST_CASE("undamped monodromy has a closed form") {
  for (Complex z : {Complex(0.3, 2.0), Complex(-0.1, 7.5), Complex(0.0, 1.0)}) {
    for (double n : {0.0, 1.0, 2.0}) {
      const Complex w = principal_sqrt(z * z + 4.0 * kPi * kPi * n * n);
      const auto r = monodromy_matrix(z, n, DampingProfile::zero(), 4096);
      CHECK(max_diff(r.m, free_block(w, 1.0)) <= 1e-9 * std::max(1.0, std::abs(std::cosh(w))));
    }
  }
}

TEST_CASE("unit determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-0.5, 0.1), im(0.0, 20.0);
  const auto s = DampingProfile::strip(1.0, 0.25);
  for (int i = 0; i < 100; ++i) {
    const Complex z(re(rng), im(rng));
    const double n = static_cast<double>(i % 3);
    const auto r = monodromy_matrix(z, n, s, default_steps(z, n, s, StepAccuracy::Fine));
    CAPTURE(z);
    CHECK(std::abs(det(r.m) - 1.0) <= 1e-9 * std::max(1.0, std::abs(r.m[0]) * std::abs(r.m[3])));
  }
}

TEST_CASE("fourth order convergence") {
  const auto s = DampingProfile::strip(1.0, 0.25);
  const Complex z(-0.2, 9.0);
  const auto ref = monodromy_matrix(z, 1.0, s, 16384);
  const double e1 = max_diff(monodromy_matrix(z, 1.0, s, 256).m, ref.m);
  const double e2 = max_diff(monodromy_matrix(z, 1.0, s, 512).m, ref.m);
  CHECK(e1 / e2 >= 15.0);
}

TEST_CASE("strip monodromy is the product of exact piece propagators") {
  const double sigma = 0.25, strength = 1.0;
  const auto s = DampingProfile::strip(strength, sigma);
  for (Complex z : {Complex(-0.1, 3.0), Complex(0.2, 6.0)}) {
    const double n = 1.0;
    const Complex w0 = principal_sqrt(z * z + 4.0 * kPi * kPi * n * n);
    const Complex w1 = principal_sqrt(z * z + z * strength + 4.0 * kPi * kPi * n * n);
    const auto outer = free_block(w1, 0.5 - sigma);
    const auto expect = mul(outer, mul(free_block(w0, 2.0 * sigma), outer));
    const auto got = monodromy_matrix(z, n, s, default_steps(z, n, s, StepAccuracy::Fine));
    CHECK(max_diff(got.m, expect) <= 1e-9 * std::max(1.0, std::abs(expect[0])));
  }
}

TEST_CASE("derivative matches a finite difference") {
  const auto s = DampingProfile::strip(1.0, 0.25);
  const Complex z(-0.15, 4.0), dz(1e-6, 0.0);
  const auto c0 = characteristic(z, 1.0, s, Geometry::torus(), 8192);
  const auto cp = characteristic(z + dz, 1.0, s, Geometry::torus(), 8192);
  const auto cm = characteristic(z - dz, 1.0, s, Geometry::torus(), 8192);
  CHECK(std::abs((cp.f - cm.f) / (2.0 * dz) - c0.df_dz) <= 1e-5 * std::abs(c0.df_dz));
}

TEST_CASE("real damping gives a conjugation symmetric characteristic") {
  const auto s = DampingProfile::strip(0.7, 0.2);
  const Complex z(-0.2, 5.5);
  const auto a = characteristic(z, 1.0, s, Geometry::torus());
  const auto b = characteristic(std::conj(z), 1.0, s, Geometry::torus());
  CHECK(std::abs(a.f - std::conj(b.f)) <= 1e-10 * std::max(1.0, std::abs(a.f)));
}

TEST_CASE("undamped characteristic zeros") {
  // 2 - 2 cosh w vanishes at w = 2 pi i k.
  const auto zero = DampingProfile::zero();
  CHECK(std::abs(characteristic(Complex(0.0, kTwoPi), 0.0, zero, Geometry::torus()).f) <= 1e-9);
  CHECK(std::abs(characteristic(Complex(0.0, kTwoPi * std::sqrt(2.0)), 1.0, zero, Geometry::torus()).f) <=
        1e-9);
  CHECK(std::abs(characteristic(Complex(0.0, kPi), 0.0, zero, Geometry::torus()).f) > 1.0);
  // Dirichlet square: M12 = sinh w / w vanishes at w = i pi k; n = 1/2 adds pi^2.
  CHECK(std::abs(characteristic(Complex(0.0, kPi * std::sqrt(2.0)), 0.5, zero,
                                Geometry::dirichlet_square()).f) <= 1e-9);
}

TEST_CASE("newton converges to the strip branch root") {
  BranchParams p;
  const auto root = solve_branch_at_h(p, 0.02);
  const auto s = DampingProfile::strip(1.0, 0.25);
  const auto sol = newton_refine(root.z + Complex(1e-3, -1e-3), root.n, s, Geometry::torus());
  CHECK(std::abs(sol.z - root.z) <= 1e-8);
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.newton_iterations <= 10);
  CHECK(sol.boundary_mismatch <= 1e-6);
  CHECK(std::abs(rayleigh_real_part(sol, s) - sol.z.real()) <= 1e-5);
}

TEST_CASE("newton converges on an undamped double root") {
  NewtonOptions o;
  o.multiplicity = 2;
  const auto sol =
      newton_refine(Complex(0.01, kTwoPi + 0.02), 0.0, DampingProfile::zero(), Geometry::torus(), o);
  CHECK(std::abs(sol.z - Complex(0.0, kTwoPi)) <= 1e-6);
}

TEST_CASE("newton converges on an undamped simple root") {
  // n = 1, zero horizontal index: z = 2 pi i is simple.
  const auto sol = newton_refine(Complex(0.01, kTwoPi - 0.05), 1.0, DampingProfile::zero(), Geometry::torus());
  CHECK(std::abs(sol.z - Complex(0.0, kTwoPi)) <= 1e-9);
}

TEST_CASE("constant damping roots") {
  // z^2 + c z + 4 pi^2 n^2 = 0 for the x-constant mode.
  const double c = 0.8;
  const Complex expect(-c / 2.0, std::sqrt(4.0 * kPi * kPi - c * c / 4.0));
  const auto sol = newton_refine(expect + Complex(0.01, 0.01), 1.0, DampingProfile::constant(c),
                                 Geometry::torus());
  CHECK(std::abs(sol.z - expect) <= 1e-9);
  CHECK(std::abs(rayleigh_real_part(sol, DampingProfile::constant(c)) + c / 2.0) <= 1e-9);
}

TEST_CASE("winding number") {
  const auto zero = DampingProfile::zero();
  const Box around{-0.5, 0.5, kTwoPi - 0.5, kTwoPi + 0.5};
  const auto w0 = winding_number(around, 0.0, zero, Geometry::torus());
  CHECK(w0.count == 2);
  CHECK(std::abs(w0.first_moment - 2.0 * Complex(0.0, kTwoPi)) <= 1e-6);
  CHECK(winding_number(around, 1.0, zero, Geometry::torus()).count == 1);
  const Box empty{-0.5, 0.5, 2.0, 3.0};
  CHECK(winding_number(empty, 0.0, zero, Geometry::torus()).count == 0);
}

TEST_CASE("box search") {
  const auto zero = DampingProfile::zero();
  const std::vector<double> ns = {0.0, 1.0};
  const auto sols = spectrum_in_box({-0.5, 0.5, 5.0, 7.0}, ns, zero, Geometry::torus());
  REQUIRE(sols.size() == 2);
  int total = 0;
  for (const auto& s : sols) {
    CHECK(std::abs(s.z - Complex(0.0, kTwoPi)) <= 1e-6);
    total += s.multiplicity;
  }
  CHECK(total == 3);
  const std::vector<double> n0 = {0.0};
  CHECK(spectrum_in_box({-0.5, 0.5, 2.0, 3.0}, n0, zero, Geometry::torus()).empty());

  // Strip spectrum in a small box is the branch root and its mode is sane.
  BranchParams p;
  const auto root = solve_branch_at_h(p, 0.02);
  const std::vector<double> nr = {root.n};
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const Box b{root.z.real() - 0.05, root.z.real() + 0.05, root.z.imag() - 0.25, root.z.imag() + 0.25};
  const auto found = spectrum_in_box(b, nr, strip, Geometry::torus());
  REQUIRE(found.size() >= 1);
  bool hit = false;
  for (const auto& s : found) {
    hit = hit || std::abs(s.z - root.z) <= 1e-8;
    CHECK(s.z.real() <= 1e-9);
    CHECK(s.z.real() >= -0.5 - 1e-9);
  }
  CHECK(hit);
}

TEST_CASE("box ordering and invalid input") {
  const std::vector<double> ns = {0.0};
  CHECK(code_of([&] {
          spectrum_in_box({0.5, -0.5, 1.0, 2.0}, ns, DampingProfile::zero(), Geometry::torus());
        }) == ErrorCode::InvalidArgument);
}

}
