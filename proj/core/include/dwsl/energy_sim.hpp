// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <vector>

#include "dwsl/band.hpp"
#include "dwsl/damping.hpp"
#include "dwsl/fd_grid.hpp"
#include "dwsl/fit.hpp"
#include "dwsl/types.hpp"

namespace dwsl {

enum class DataShape {
  Fourier,  // amplitude * cos(2 pi (m x + n y))
  Bump      // amplitude * chi(x) * cos(2 pi n y), chi the smooth bump of the given support
};

struct DataTerm {
  DataShape shape = DataShape::Fourier;
  int n = 0;
  int m = 0;
  double amplitude = 1.0;
  double support = 0.2;  // Bump only
};

// u(x, y) = sum over vertical index n of u_n(x) e^{2 pi i n y}, stored for
// every n in `modes` (both signs when present in the data).
struct SimState {
  FdGrid grid;
  std::vector<int> modes;
  std::vector<std::vector<Complex>> u, v;
  double t = 0.0;
  double domain_norm = 0.0;  // ||A(u0, u1)|| in the energy space, from the grid operator
};

// u1 = 0. Real data: u_{-n} = conj(u_n).
SimState init_smooth_data(std::span<const DataTerm> data, const FdGrid& grid);

double energy(const SimState& state);
double mode_energy(const SimState& state, std::size_t index);
// sum over modes of int b |v_n|^2 dx
double damping_rate(const SimState& state);
// max |u_{-n} - conj(u_n)| over paired modes.
double conjugate_defect(const SimState& state);

// Crank-Nicolson on (u, v) for -u'' + 4 pi^2 n^2 u + b v, factorised once for
// a fixed dt. Rejects dt > dx / 2 with CFLViolation.
class ModeStepper {
 public:
  ModeStepper(const FdGrid& grid, int n, double dt);
  void step(std::vector<Complex>& u, std::vector<Complex>& v) const;
  double dt() const { return dt_; }

 private:
  void apply_laplacian(std::span<const double> x, std::span<double> y) const;
  const FdGrid* grid_;
  double dt_, k2_, inv_dx2_;
  PeriodicTridiagonalLU<double> lu_;
  mutable std::vector<double> u_, v_, lu_u_, lu_v_, rhs_;
};

// One step for every mode (builds the factorisations each call).
void step(SimState& state, double dt);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> damping_integrals;  // cumulative, trapezoid in time
  std::map<int, std::vector<double>> mode_energies;  // filled when requested
  double initial_energy = 0.0;
  double domain_norm = 0.0;
  // max over samples of |E(t) - E(0) + D(t)|
  double identity_residual = 0.0;
  // max over consecutive samples of E(t_{k+1}) - E(t_k)
  double max_increase = 0.0;
};

struct RunOptions {
  int grid_n = 256;
  double sample_interval = 0.1;
  bool per_mode = false;
  // Evolve n >= 0 only and take u_{-n} = conj(u_n).
  bool conjugate_symmetry = true;
};

EnergyTrace run(const DampingProfile& profile, std::span<const DataTerm> data, double t_final,
                double dt, const RunOptions& options = {});

enum class DecayModel { Exponential, Polynomial };

struct DecayFit {
  DecayModel model = DecayModel::Exponential;
  // Exponential: rate r in E ~ e^{-r t}. Polynomial: exponent p in E ~ t^p.
  double value = 0.0;
  double r2 = 0.0;
  LinearFit line;
};

// Least squares on the samples with t >= window_start (default: the late
// half). FitUnstable below 20 samples.
DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   DecayModel model, double window_start = -1.0);
DecayFit fit_decay(const EnergyTrace& trace, DecayModel model, double window_start = -1.0);

}  // namespace dwsl
