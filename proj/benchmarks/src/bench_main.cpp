// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "dwsl/dense.hpp"
#include "dwsl/energy_sim.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/quasimode.hpp"
#include "dwsl/resolvent.hpp"
#include "dwsl/strip_spectrum.hpp"

namespace {

using namespace dwsl;

void BM_Monodromy(benchmark::State& state) {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monodromy_matrix(Complex(-0.2, 50.0), 8.0, strip, steps));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Monodromy)->Arg(1024)->Arg(8192);

void BM_BranchRoot(benchmark::State& state) {
  BranchParams p;
  for (auto _ : state) benchmark::DoNotOptimize(solve_branch_at_h(p, 0.005));
}
BENCHMARK(BM_BranchRoot);

void BM_DenseEigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  DenseMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(1.0 / (1 + i + j), i == j ? 1.0 : 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(a));
}
BENCHMARK(BM_DenseEigenvalues)->Arg(64)->Arg(128);

void BM_SmallestSingularValue(benchmark::State& state) {
  const auto op = assemble_mode_operator(40.0, 6.0, DampingProfile::strip(1.0, 0.25),
                                         static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smallest_singular_value(op));
}
BENCHMARK(BM_SmallestSingularValue)->Arg(512)->Arg(2048);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const auto grid = make_fd_grid(DampingProfile::strip(1.0, 0.25), static_cast<int>(state.range(0)));
  ModeStepper stepper(grid, 3, 0.25 * grid.dx);
  std::vector<Complex> u(grid.size, 1.0), v(grid.size, 0.0);
  for (auto _ : state) {
    stepper.step(u, v);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(128)->Arg(1024);

void BM_QuasimodeRatio(benchmark::State& state) {
  const auto strip = DampingProfile::strip(1.0, 0.25);
  const auto c = build_cutoff(strip, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(quasimode_ratio(20, c, strip));
}
BENCHMARK(BM_QuasimodeRatio);

}  // namespace

BENCHMARK_MAIN();
