// SPDX-License-Identifier: Apache-2.0
#include "dwsl/energy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/parallel.hpp"
#include "dwsl/quasimode.hpp"

namespace dwsl {
namespace {

double wavenumber_sq(int n) { return 4.0 * kPi * kPi * double(n) * double(n); }

PeriodicTridiagonal<double> implicit_matrix(const FdGrid& g, int n, double dt) {
  const double inv = 1.0 / (g.dx * g.dx);
  const double c = 0.25 * dt * dt;
  PeriodicTridiagonal<double> a;
  a.diag.resize(g.size);
  a.lower.assign(g.size, -c * inv);
  a.upper.assign(g.size, -c * inv);
  for (int j = 0; j < g.size; ++j)
    a.diag[j] = 1.0 + 0.5 * dt * g.b[j] + c * (2.0 * inv + wavenumber_sq(n));
  return a;
}

double check_dt(const FdGrid& g, double dt) {
  if (!(dt > 0.0)) raise(ErrorCode::InvalidArgument, "dt must be positive");
  if (dt > 0.5 * g.dx)
    raise(ErrorCode::CFLViolation, "dt = " + format_double(dt) + " exceeds dx/2 = " +
                                       format_double(0.5 * g.dx));
  return dt;
}

void laplacian(const FdGrid& g, int n, std::span<const Complex> u, std::span<Complex> out) {
  const int size = g.size;
  const double inv = 1.0 / (g.dx * g.dx), k2 = wavenumber_sq(n);
  for (int j = 0; j < size; ++j) {
    const Complex l = u[(j - 1 + size) % size], r = u[(j + 1) % size];
    out[j] = (2.0 * u[j] - l - r) * inv + k2 * u[j];
  }
}

double energy_of(const FdGrid& g, int n, std::span<const Complex> u, std::span<const Complex> v) {
  const int size = g.size;
  const double k2 = wavenumber_sq(n);
  double grad = 0.0, mass = 0.0, kin = 0.0;
  for (int j = 0; j < size; ++j) {
    grad += std::norm(u[(j + 1) % size] - u[j]);
    mass += std::norm(u[j]);
    kin += std::norm(v[j]);
  }
  return 0.5 * (grad / g.dx + (k2 * mass + kin) * g.dx);
}

double damping_of(const FdGrid& g, std::span<const Complex> v) {
  double acc = 0.0;
  for (int j = 0; j < g.size; ++j) acc += g.b[j] * std::norm(v[j]);
  return acc * g.dx;
}

}  // namespace

SimState init_smooth_data(std::span<const DataTerm> data, const FdGrid& grid) {
  std::set<int> present;
  for (const auto& d : data) {
    if (d.shape == DataShape::Bump && !(d.support > 0.0 && d.support <= 0.5))
      raise(ErrorCode::InvalidArgument, "bump support must lie in (0, 1/2]");
    present.insert(d.n);
    present.insert(-d.n);
  }
  SimState s;
  s.grid = grid;
  s.modes.assign(present.begin(), present.end());
  s.u.assign(s.modes.size(), std::vector<Complex>(grid.size));
  s.v.assign(s.modes.size(), std::vector<Complex>(grid.size));
  auto slot = [&](int n) {
    return std::size_t(std::lower_bound(s.modes.begin(), s.modes.end(), n) - s.modes.begin());
  };
  for (const auto& d : data) {
    std::vector<double> chi(grid.size, 1.0);
    if (d.shape == DataShape::Bump) {
      Cutoff c = bump_cutoff(d.support, grid.size + 1);
      std::copy_n(c.samples.begin(), grid.size, chi.begin());
    }
    const int m = d.shape == DataShape::Fourier ? d.m : 0;
    const double half = d.n == 0 ? 1.0 : 0.5;
    for (int j = 0; j < grid.size; ++j) {
      const Complex e = std::polar(1.0, kTwoPi * m * grid.x[j]);
      const double a = d.amplitude * chi[j];
      if (d.n == 0) {
        s.u[slot(0)][j] += a * e.real();
      } else {
        s.u[slot(d.n)][j] += half * a * e;
        s.u[slot(-d.n)][j] += half * a * std::conj(e);
      }
    }
  }
  double acc = 0.0;
  std::vector<Complex> lu(grid.size);
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    laplacian(grid, s.modes[i], s.u[i], lu);
    for (const auto& z : lu) acc += std::norm(z) * grid.dx;
  }
  s.domain_norm = std::sqrt(acc);
  return s;
}

double mode_energy(const SimState& state, std::size_t index) {
  return energy_of(state.grid, state.modes[index], state.u[index], state.v[index]);
}

double energy(const SimState& state) {
  double e = 0.0;
  for (std::size_t i = 0; i < state.modes.size(); ++i) e += mode_energy(state, i);
  return e;
}

double damping_rate(const SimState& state) {
  double d = 0.0;
  for (const auto& v : state.v) d += damping_of(state.grid, v);
  return d;
}

double conjugate_defect(const SimState& state) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.modes.size(); ++i) {
    auto it = std::lower_bound(state.modes.begin(), state.modes.end(), -state.modes[i]);
    if (it == state.modes.end() || *it != -state.modes[i]) continue;
    const std::size_t k = std::size_t(it - state.modes.begin());
    for (int j = 0; j < state.grid.size; ++j) {
      worst = std::max(worst, std::abs(state.u[k][j] - std::conj(state.u[i][j])));
      worst = std::max(worst, std::abs(state.v[k][j] - std::conj(state.v[i][j])));
    }
  }
  return worst;
}

ModeStepper::ModeStepper(const FdGrid& grid, int n, double dt)
    : grid_(&grid),
      dt_(check_dt(grid, dt)),
      k2_(wavenumber_sq(n)),
      inv_dx2_(1.0 / (grid.dx * grid.dx)),
      lu_(implicit_matrix(grid, n, dt)),
      u_(grid.size),
      v_(grid.size),
      lu_u_(grid.size),
      lu_v_(grid.size),
      rhs_(grid.size) {}

void ModeStepper::apply_laplacian(std::span<const double> x, std::span<double> y) const {
  const int size = grid_->size;
  for (int j = 0; j < size; ++j)
    y[j] = (2.0 * x[j] - x[(j - 1 + size) % size] - x[(j + 1) % size]) * inv_dx2_ + k2_ * x[j];
}

// (I + dt/2 b + dt^2/4 L) v+ = (I - dt/2 b - dt^2/4 L) v - dt L u,
// u+ = u + dt/2 (v + v+).
void ModeStepper::step(std::vector<Complex>& u, std::vector<Complex>& v) const {
  const int size = grid_->size;
  const double c = 0.25 * dt_ * dt_;
  for (int part = 0; part < 2; ++part) {
    for (int j = 0; j < size; ++j) {
      u_[j] = part == 0 ? u[j].real() : u[j].imag();
      v_[j] = part == 0 ? v[j].real() : v[j].imag();
    }
    apply_laplacian(u_, lu_u_);
    apply_laplacian(v_, lu_v_);
    for (int j = 0; j < size; ++j)
      rhs_[j] = v_[j] - 0.5 * dt_ * grid_->b[j] * v_[j] - c * lu_v_[j] - dt_ * lu_u_[j];
    lu_.solve_in_place(rhs_);
    for (int j = 0; j < size; ++j) {
      const double un = u_[j] + 0.5 * dt_ * (v_[j] + rhs_[j]);
      if (part == 0) {
        u[j].real(un);
        v[j].real(rhs_[j]);
      } else {
        u[j].imag(un);
        v[j].imag(rhs_[j]);
      }
    }
  }
}

void step(SimState& state, double dt) {
  for (std::size_t i = 0; i < state.modes.size(); ++i) {
    ModeStepper stepper(state.grid, state.modes[i], dt);
    stepper.step(state.u[i], state.v[i]);
  }
  state.t += dt;
}

EnergyTrace run(const DampingProfile& profile, std::span<const DataTerm> data, double t_final,
                double dt, const RunOptions& options) {
  if (!(t_final > 0.0)) raise(ErrorCode::InvalidArgument, "T_final must be positive");
  const FdGrid grid = make_fd_grid(profile, options.grid_n);
  check_dt(grid, dt);
  const long long per_sample = std::llround(options.sample_interval / dt);
  const long long samples = std::llround(t_final / options.sample_interval);
  if (per_sample < 1 || samples < 1 ||
      std::abs(per_sample * dt - options.sample_interval) > 1e-9 * options.sample_interval ||
      std::abs(samples * options.sample_interval - t_final) > 1e-9 * t_final)
    raise(ErrorCode::InvalidArgument, "T_final, sample_interval and dt must nest as integers");

  SimState state = init_smooth_data(data, grid);
  const std::size_t modes = state.modes.size();
  std::vector<std::vector<double>> e(modes, std::vector<double>(samples + 1));
  std::vector<std::vector<double>> d(modes, std::vector<double>(samples + 1));
  // Slot i evolves mode i; with conjugate symmetry a negative mode copies
  // the traces of its partner instead.
  auto partner = [&](std::size_t i) {
    auto it = std::lower_bound(state.modes.begin(), state.modes.end(), -state.modes[i]);
    return std::size_t(it - state.modes.begin());
  };
  std::vector<std::size_t> evolved;
  for (std::size_t i = 0; i < modes; ++i)
    if (!options.conjugate_symmetry || state.modes[i] >= 0) evolved.push_back(i);
  parallel_for(evolved.size(), [&](std::size_t slot) {
    const std::size_t i = evolved[slot];
    ModeStepper stepper(state.grid, state.modes[i], dt);
    auto& u = state.u[i];
    auto& v = state.v[i];
    double cumulative = 0.0;
    double rate = damping_of(grid, v);
    e[i][0] = energy_of(grid, state.modes[i], u, v);
    for (long long k = 1; k <= samples; ++k) {
      for (long long j = 0; j < per_sample; ++j) {
        stepper.step(u, v);
        const double next = damping_of(grid, v);
        cumulative += 0.5 * dt * (rate + next);
        rate = next;
      }
      e[i][k] = energy_of(grid, state.modes[i], u, v);
      d[i][k] = cumulative;
    }
  });
  if (options.conjugate_symmetry)
    for (std::size_t i = 0; i < modes; ++i)
      if (state.modes[i] < 0) {
        const std::size_t p = partner(i);
        e[i] = e[p];
        d[i] = d[p];
      }

  EnergyTrace trace;
  trace.domain_norm = state.domain_norm;
  trace.times.resize(samples + 1);
  trace.energies.assign(samples + 1, 0.0);
  trace.damping_integrals.assign(samples + 1, 0.0);
  for (long long k = 0; k <= samples; ++k) {
    trace.times[k] = k * options.sample_interval;
    for (std::size_t i = 0; i < modes; ++i) {
      trace.energies[k] += e[i][k];
      trace.damping_integrals[k] += d[i][k];
    }
  }
  if (options.per_mode)
    for (std::size_t i = 0; i < modes; ++i) trace.mode_energies[state.modes[i]] = e[i];
  trace.initial_energy = trace.energies[0];
  for (long long k = 0; k <= samples; ++k) {
    trace.identity_residual =
        std::max(trace.identity_residual,
                 std::abs(trace.energies[k] - trace.energies[0] + trace.damping_integrals[k]));
    if (k > 0)
      trace.max_increase = std::max(trace.max_increase, trace.energies[k] - trace.energies[k - 1]);
  }
  return trace;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   DecayModel model, double window_start) {
  if (times.size() != energies.size())
    raise(ErrorCode::InvalidArgument, "times and energies differ in length");
  if (times.empty()) raise(ErrorCode::FitUnstable, "empty trace");
  if (window_start < 0.0) window_start = 0.5 * times.back();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window_start || !(energies[i] > 0.0)) continue;
    if (model == DecayModel::Polynomial && !(times[i] > 0.0)) continue;
    x.push_back(model == DecayModel::Exponential ? times[i] : std::log(times[i]));
    y.push_back(std::log(energies[i]));
  }
  if (x.size() < 20)
    raise(ErrorCode::FitUnstable, "decay fit window holds " + std::to_string(x.size()) +
                                      " positive samples, need 20");
  DecayFit f;
  f.model = model;
  f.line = fit_line(x, y);
  f.value = model == DecayModel::Exponential ? -f.line.slope : f.line.slope;
  f.r2 = f.line.r2;
  return f;
}

DecayFit fit_decay(const EnergyTrace& trace, DecayModel model, double window_start) {
  return fit_decay(trace.times, trace.energies, model, window_start);
}

}  // namespace dwsl
