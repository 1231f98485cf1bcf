// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <functional>

#include "dwsl/energy_sim.hpp"
#include "dwsl/error.hpp"

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

DataTerm fourier(int n, int m, double amplitude) {
  DataTerm d;
  d.shape = DataShape::Fourier;
  d.n = n;
  d.m = m;
  d.amplitude = amplitude;
  return d;
}

DataTerm bump(int n, double amplitude, double support) {
  DataTerm d;
  d.shape = DataShape::Bump;
  d.n = n;
  d.amplitude = amplitude;
  d.support = support;
  return d;
}

}  // namespace

TEST_SUITE("energy_sim") {

TEST_CASE("initial energy") {
  const auto grid = make_fd_grid(DampingProfile::zero(), 128);
  const std::vector<DataTerm> one = {fourier(1, 0, 1.0)};
  const auto s = init_smooth_data(one, grid);
  REQUIRE(s.modes == std::vector<int>{-1, 1});
  CHECK(energy(s) == doctest::Approx(kPi * kPi).epsilon(1e-13));
  CHECK(conjugate_defect(s) == 0.0);
  CHECK(damping_rate(s) == 0.0);
  const std::vector<DataTerm> none;
  const auto empty = init_smooth_data(none, grid);
  CHECK(empty.modes.empty());
  CHECK(energy(empty) == 0.0);
  const std::vector<DataTerm> bad = {bump(1, 1.0, 0.7)};
  CHECK(code_of([&] { init_smooth_data(bad, grid); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("undamped energy is conserved") {
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0), fourier(2, 3, 0.5)};
  RunOptions o;
  o.grid_n = 128;
  const auto t = run(DampingProfile::zero(), data, 5.0, 1e-3, o);
  for (double e : t.energies) CHECK(std::abs(e - t.initial_energy) <= 1e-11 * t.initial_energy);
  CHECK(t.identity_residual <= 1e-11 * t.initial_energy);
}

TEST_CASE("constant damping matches the damped oscillator") {
  // u_0 = cos(2 pi x) is a grid eigenvector with eigenvalue w2, so the
  // discrete mode solves u'' + c u' + w2 u = 0 up to the time step error.
  const int grid_n = 64;
  const double c = 1.0, dx = 1.0 / grid_n;
  const double sn = std::sin(kPi * dx);
  const double w2 = 4.0 * sn * sn / (dx * dx);
  const double mu = 0.5 * c, nu = std::sqrt(w2 - mu * mu);
  const std::vector<DataTerm> data = {fourier(0, 1, 1.0)};
  RunOptions o;
  o.grid_n = grid_n;
  o.sample_interval = 0.5;
  const auto t = run(DampingProfile::constant(c), data, 10.0, 2.5e-5, o);
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const double tt = t.times[k];
    const double u = std::exp(-mu * tt) * (std::cos(nu * tt) + mu / nu * std::sin(nu * tt));
    const double du = -std::exp(-mu * tt) * w2 / nu * std::sin(nu * tt);
    const double ratio = (du * du + w2 * u * u) / w2;
    CAPTURE(tt);
    CHECK(std::abs(t.energies[k] / t.initial_energy - ratio) <= 1e-6);
  }
}

TEST_CASE("conjugate symmetry is an exact shortcut") {
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0), fourier(2, 1, 0.25), bump(3, 0.2, 0.2)};
  RunOptions o;
  o.grid_n = 128;
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto a = run(strip, data, 2.0, 1e-3, o);
  o.conjugate_symmetry = false;
  const auto b = run(strip, data, 2.0, 1e-3, o);
  for (std::size_t k = 0; k < a.energies.size(); ++k)
    CHECK(std::abs(a.energies[k] - b.energies[k]) <= 1e-12 * a.initial_energy);
}

TEST_CASE("time step limit") {
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0)};
  RunOptions o;
  o.grid_n = 64;
  CHECK(code_of([&] { run(DampingProfile::zero(), data, 1.0, 0.01, o); }) == ErrorCode::CFLViolation);
  CHECK(code_of([&] { run(DampingProfile::zero(), data, 1.0, -0.01, o); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { run(DampingProfile::zero(), data, 1.0, 3e-3, o); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { ModeStepper(make_fd_grid(DampingProfile::zero(), 64), 1, 0.01); }) ==
        ErrorCode::CFLViolation);
}

TEST_CASE("damped energy never increases and the identity converges") {
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0), fourier(0, 1, 0.5), fourier(2, 1, 0.25)};
  RunOptions o;
  o.grid_n = 128;
  o.sample_interval = 0.05;
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto a = run(strip, data, 5.0, 1e-3, o);
  const auto b = run(strip, data, 5.0, 5e-4, o);
  CHECK(a.max_increase <= 1e-12 * a.initial_energy);
  CHECK(a.energies.back() < a.initial_energy);
  for (std::size_t k = 0; k < a.energies.size(); ++k) CHECK(a.damping_integrals[k] >= 0.0);
  CHECK(a.identity_residual / b.identity_residual >= 3.5);
  CHECK(a.identity_residual <= 1e-4 * a.initial_energy);
}

TEST_CASE("modes evolve independently") {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  RunOptions o;
  o.grid_n = 128;
  o.per_mode = true;
  const std::vector<DataTerm> both = {fourier(1, 0, 1.0), bump(3, 0.5, 0.2)};
  const std::vector<DataTerm> only = {fourier(1, 0, 1.0)};
  const auto t = run(strip, both, 2.0, 1e-3, o);
  const auto s = run(strip, only, 2.0, 1e-3, o);
  REQUIRE(t.mode_energies.size() == 4);
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    double sum = 0.0;
    for (const auto& [n, e] : t.mode_energies) sum += e[k];
    CHECK(sum == doctest::Approx(t.energies[k]).epsilon(1e-13));
    CHECK(t.mode_energies.at(1)[k] == doctest::Approx(s.mode_energies.at(1)[k]).epsilon(1e-13));
    CHECK(t.mode_energies.at(-3)[k] == t.mode_energies.at(3)[k]);
  }
}

TEST_CASE("step by step agrees with run") {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto grid = make_fd_grid(strip, 64);
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0)};
  auto s = init_smooth_data(data, grid);
  for (int k = 0; k < 100; ++k) step(s, 1e-3);
  CHECK(s.t == doctest::Approx(0.1));
  CHECK(conjugate_defect(s) <= 1e-14);
  RunOptions o;
  o.grid_n = 64;
  const auto t = run(strip, data, 0.1, 1e-3, o);
  CHECK(energy(s) == doctest::Approx(t.energies.back()).epsilon(1e-12));
}

TEST_CASE("decay fits") {
  std::vector<double> t, e, p;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    e.push_back(3.0 * std::exp(-0.7 * t.back()));
    p.push_back(t.back() > 0.0 ? 5.0 * std::pow(t.back(), -2.0) : 1.0);
  }
  const auto fe = fit_decay(t, e, DecayModel::Exponential);
  CHECK(fe.value == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fe.r2 == doctest::Approx(1.0));
  const auto fp = fit_decay(t, p, DecayModel::Polynomial, 1.0);
  CHECK(fp.value == doctest::Approx(-2.0).epsilon(1e-12));
  const std::vector<double> few_t(t.begin(), t.begin() + 10), few_e(e.begin(), e.begin() + 10);
  CHECK(code_of([&] { fit_decay(few_t, few_e, DecayModel::Exponential, 0.0); }) == ErrorCode::FitUnstable);
  const std::vector<double> empty;
  CHECK(code_of([&] { fit_decay(empty, empty, DecayModel::Exponential); }) == ErrorCode::FitUnstable);
}

TEST_CASE("constant damping prefers the exponential model") {
  const std::vector<DataTerm> data = {fourier(1, 0, 1.0), fourier(0, 1, 0.5)};
  RunOptions o;
  o.grid_n = 64;
  const auto t = run(DampingProfile::constant(1.0), data, 20.0, 1e-3, o);
  const auto fe = fit_decay(t, DecayModel::Exponential);
  const auto fp = fit_decay(t, DecayModel::Polynomial);
  CHECK(fe.r2 > fp.r2);
  CHECK(fe.value == doctest::Approx(1.0).epsilon(0.1));
}

}
