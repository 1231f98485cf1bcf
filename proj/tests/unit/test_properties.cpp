// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "dwsl/config.hpp"
#include "dwsl/energy_sim.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/quasimode.hpp"
#include "dwsl/resolvent.hpp"
#include "dwsl/semigroup_lab.hpp"
#include "dwsl/strip_spectrum.hpp"

using namespace dwsl;

TEST_SUITE("properties") {

TEST_CASE("branch roots over random strips") {
  std::mt19937 rng(20261014);
  std::uniform_real_distribution<double> strength(0.5, 2.0), width(0.15, 0.35), h(0.01, 0.03);
  for (int trial = 0; trial < 12; ++trial) {
    BranchParams p;
    p.strength = strength(rng);
    p.half_width = width(rng);
    p.parity = trial % 2 ? Parity::Odd : Parity::Even;
    p.m = trial % 2 ? 1 : 0;
    const double hv = h(rng);
    CAPTURE(p.strength);
    CAPTURE(p.half_width);
    CAPTURE(hv);
    const auto r = solve_branch_at_h(p, hv);
    CHECK(r.residual <= 1e-10);
    CHECK(r.z.real() <= 1e-9);
    CHECK(r.z.real() >= -p.strength / 2.0 - 1e-9);
    CHECK(r.zeta_tilde.imag() > 0.0);
    CHECK(std::abs(rayleigh_real_part(r, p) - r.z.real()) <= 1e-5);
  }
}

TEST_CASE("conjugate symmetry of the characteristic") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> re(-1.0, 0.5), im(-15.0, 15.0);
  const auto p = DampingProfile::smooth_exp(0.8, 0.2, 1.5);
  for (int i = 0; i < 20; ++i) {
    const Complex z(re(rng), im(rng));
    const auto a = characteristic(z, 1.0, p, Geometry::torus(), 2048);
    const auto b = characteristic(std::conj(z), 1.0, p, Geometry::torus(), 2048);
    CHECK(std::abs(a.f - std::conj(b.f)) <= 1e-9 * std::max(1.0, std::abs(a.f)));
  }
}

TEST_CASE("profile config round trip over random parameters") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.01, 3.0), w(0.01, 0.49);
  for (int i = 0; i < 50; ++i) {
    const auto s = DampingProfile::strip(u(rng), w(rng));
    CHECK(profile_from_config(to_config(s)) == s);
    const auto e = DampingProfile::smooth_exp(u(rng), w(rng), u(rng));
    CHECK(profile_from_config(to_config(e)) == e);
    const double x = u(rng);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("quasimode ratio is n independent for random supports") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> margin(0.01, 0.2), n(1.0, 500.0);
  const auto strip = DampingProfile::strip(1.0, 0.25);
  for (int i = 0; i < 6; ++i) {
    const auto c = build_cutoff(strip, margin(rng), 2049);
    const double base = quasimode_ratio(1, c, strip);
    for (int k = 0; k < 5; ++k) {
      const int nn = static_cast<int>(n(rng));
      CHECK(std::abs(quasimode_ratio(nn, c, strip) - base) <= 1e-10 * base);
    }
  }
}

TEST_CASE("damped energy is non increasing for random data") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> idx(0, 4);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const auto strip = DampingProfile::strip(1.0, 0.25);
  RunOptions o;
  o.grid_n = 64;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<DataTerm> data;
    for (int k = 0; k < 3; ++k) {
      DataTerm d;
      d.n = idx(rng);
      d.m = idx(rng);
      d.amplitude = amp(rng);
      data.push_back(d);
    }
    const auto t = run(strip, data, 2.0, 1e-3, o);
    CHECK(t.max_increase <= 1e-12 * std::max(1.0, t.initial_energy));
  }
}

TEST_CASE("resolvent identity at random points") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> re(-0.4, -0.01), im(1.0, 50.0);
  const auto sys = build_system(DampingProfile::smooth_exp(1.0, 0.25, 1.0), 6);
  for (int i = 0; i < 10; ++i) CHECK(check_resolvent_identity(sys, Complex(re(rng), im(rng))) <= 1e-10);
}

TEST_CASE("resolvent norm is even in s") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> s(0.5, 30.0);
  const auto strip = DampingProfile::strip(1.0, 0.25);
  for (int i = 0; i < 4; ++i) {
    const double v = s(rng);
    // Conjugation maps the s operator to the -s one.
    CHECK(resolvent_norm(v, strip, 0, 256) == doctest::Approx(resolvent_norm(-v, strip, 0, 256)).epsilon(1e-8));
  }
}

}
