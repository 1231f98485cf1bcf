// SPDX-License-Identifier: Apache-2.0
#include "dwsl_cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>

#include "dwsl/energy_sim.hpp"
#include "dwsl/error.hpp"
#include "dwsl/fit.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/quasimode.hpp"
#include "dwsl/resolvent.hpp"
#include "dwsl/semigroup_lab.hpp"
#include "dwsl/strip_spectrum.hpp"

namespace dwsl::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BranchParams branch_params(const AcceptanceOptions& o, Parity parity, int m) {
  BranchParams p;
  p.strength = o.strength;
  p.half_width = o.half_width;
  p.parity = parity;
  p.m = m;
  return p;
}

DampingProfile strip_of(const AcceptanceOptions& o) {
  return DampingProfile::strip(o.strength, o.half_width);
}

double scaling_constant(const AcceptanceOptions& o) {
  const double q = kPi / 2.0;
  return q * q / (std::pow(o.half_width, 3) * std::sqrt(2.0 * o.strength));
}

const std::vector<std::pair<Parity, int>> kCrossBranches = {
    {Parity::Even, 0}, {Parity::Even, 1}, {Parity::Odd, 1}, {Parity::Odd, 2}};

Outcome branch_order(const AcceptanceOptions& o, Clock::time_point t0) {
  const std::vector<double> h = {0.04, 0.02, 0.01, 0.005};
  const auto pts = branch(branch_params(o, Parity::Even, 0), h);
  std::vector<double> lx, ly;
  std::string errs;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = std::abs(pts[i].root.zeta_tilde.imag() - pts[i].asymptotic_im_zeta);
    lx.push_back(std::log(h[i]));
    ly.push_back(std::log(e));
    errs += fmt("%s%.3g", i ? "," : "", e);
  }
  const double slope = fit_line(lx, ly).slope;
  const double t = elapsed(t0);
  return {slope >= 1.8 && t < 1.0,
          fmt("order=%.4f (need >= 1.8) errors=[%s] time=%.3fs (limit 1s)", slope, errs.c_str(), t)};
}

Outcome branch_scaling(const AcceptanceOptions& o, Clock::time_point t0) {
  const std::vector<double> h = {0.01, 0.005, 0.0025};
  const auto pts = branch(branch_params(o, Parity::Even, 0), h);
  const double target = scaling_constant(o);
  double worst = 0.0;
  int used = 0;
  std::string vals;
  for (const auto& p : pts) {
    if (p.root.z.imag() < 100.0) continue;
    worst = std::max(worst, std::abs(p.scaling / target - 1.0));
    vals += fmt("%s%.2f@%.0f", used ? "," : "", p.scaling, p.root.z.imag());
    ++used;
  }
  const double t = elapsed(t0);
  return {used > 0 && worst <= 0.1 && t < 1.0,
          fmt("target=%.2f values=[%s] worst_rel=%.3f (need <= 0.1) time=%.3fs", target,
              vals.c_str(), worst, t)};
}

Outcome cross_solver(const AcceptanceOptions& o, Clock::time_point t0) {
  const auto profile = strip_of(o);
  double worst = 0.0;
  std::string missing;
  for (auto [parity, m] : kCrossBranches) {
    const auto root = solve_branch_at_h(branch_params(o, parity, m), 0.02);
    const Box box{root.z.real() - 0.05, root.z.real() + 0.05, root.z.imag() - 0.25,
                  root.z.imag() + 0.25};
    BoxOptions bo;
    bo.reconstruct_modes = false;
    const auto found = spectrum_in_box(box, std::span<const double>(&root.n, 1), profile,
                                       Geometry::torus(), bo);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : found) best = std::min(best, std::abs(s.z - root.z));
    if (!std::isfinite(best)) missing += fmt(" %s/m=%d", to_string(parity), m);
    worst = std::max(worst, best);
  }
  const double t = elapsed(t0);
  return {worst <= 1e-8 && t < 30.0,
          fmt("max|dz|=%.3g (need <= 1e-8)%s%s time=%.2fs (limit 30s)", worst,
              missing.empty() ? "" : " missing:", missing.c_str(), t)};
}

Outcome spectral_sanity(const AcceptanceOptions& o, Clock::time_point) {
  const auto profile = strip_of(o);
  const double lo = -o.strength / 2.0 - 1e-9, hi = 1e-9;
  double bound_excess = 0.0, rayleigh_gap = 0.0;
  int count = 0, modes = 0;
  auto check_bounds = [&](Complex z) {
    ++count;
    if (std::abs(z.imag()) <= 1e-9) return;
    bound_excess = std::max({bound_excess, lo - z.real(), z.real() - hi});
  };
  for (double h : {0.02, 0.01}) {
    for (auto [parity, m] : kCrossBranches) {
      const auto params = branch_params(o, parity, m);
      const auto root = solve_branch_at_h(params, h);
      check_bounds(root.z);
      rayleigh_gap = std::max(rayleigh_gap, std::abs(rayleigh_real_part(root, params) - root.z.real()));
      ++modes;
    }
  }
  const std::vector<double> ns = {0.0, 1.0, 2.0};
  for (const auto& s : spectrum_in_box(Box{-0.6, 0.05, 0.5, 14.0}, ns, profile, Geometry::torus())) {
    check_bounds(s.z);
    rayleigh_gap = std::max(rayleigh_gap, std::abs(rayleigh_real_part(s, profile) - s.z.real()));
    ++modes;
  }
  for (Complex z : system_spectrum(build_system(profile, 16))) check_bounds(z);
  return {bound_excess <= 0.0 && rayleigh_gap <= 1e-5,
          fmt("eigenvalues=%d outside=%.3g rayleigh_max=%.3g over %d modes (need <= 1e-5)", count,
              bound_excess, rayleigh_gap, modes)};
}

Outcome lower_bound(const AcceptanceOptions& o, Clock::time_point t0) {
  const auto profile = strip_of(o);
  const auto cutoff = build_cutoff(profile, 0.05);
  std::vector<int> ns(100);
  for (int i = 0; i < 100; ++i) ns[i] = i + 1;
  const auto rows = quasimode_table(ns, cutoff, profile);
  double spread = 0.0;
  for (const auto& r : rows) spread = std::max(spread, std::abs(r.ratio / rows.front().ratio - 1.0));
  const double c = lower_bound_constant(cutoff);
  bool above = true;
  std::string norms;
  for (int n : {1, 5, 20}) {
    const double norm = resolvent_norm(kTwoPi * n, profile);
    above = above && norm >= c;
    norms += fmt(" n=%d:%.4g", n, norm);
  }
  const double t = elapsed(t0);
  return {spread <= 1e-10 && above && t < 60.0,
          fmt("ratio=%.12g spread=%.3g (need <= 1e-10) C=%.6g norms%s time=%.2fs", rows.front().ratio,
              spread, c, norms.c_str(), t)};
}

std::vector<DataTerm> three_mode_data() {
  return {{DataShape::Fourier, 1, 0, 1.0}, {DataShape::Fourier, 0, 1, 0.5},
          {DataShape::Fourier, 2, 1, 0.25}};
}

Outcome dissipation(const AcceptanceOptions& o, Clock::time_point t0) {
  const auto profile = strip_of(o);
  const auto data = three_mode_data();
  const auto coarse = run(profile, data, 100.0, 1e-3);
  const auto fine = run(profile, data, 100.0, 5e-4);
  const double r1 = coarse.identity_residual / coarse.initial_energy;
  const double r2 = fine.identity_residual / fine.initial_energy;
  const double factor = r1 / r2;
  const double t = elapsed(t0);
  return {r1 <= 1e-6 && factor >= 3.5 && t < 120.0,
          fmt("residual/E0=%.3g (need <= 1e-6) halved=%.3g factor=%.3f (need >= 3.5) time=%.1fs", r1,
              r2, factor, t)};
}

Outcome comparative_decay(const AcceptanceOptions& o, Clock::time_point) {
  const auto constant = DampingProfile::constant(1.0);
  const auto ctrace = run(constant, three_mode_data(), 20.0, 1e-3);
  const auto cfit = fit_decay(ctrace, DecayModel::Exponential);
  const double modal_rate = 1.0;  // every data mode is underdamped: E ~ e^{-c t}
  const bool constant_ok = cfit.r2 > 0.99 && std::abs(cfit.value / modal_rate - 1.0) <= 0.1;

  const auto strip = strip_of(o);
  const std::vector<int> ns = {4, 6, 9, 13, 19, 28, 42, 63, 96};
  std::vector<DataTerm> data;
  std::vector<double> re_z;
  for (int n : ns) {
    auto params = branch_params(o, Parity::Even, 0);
    params.n = n;
    re_z.push_back(solve_branch_at_h(params, 1.0 / (kTwoPi * n)).z.real());
    // E_n(0) ~ n^{-3/2}
    data.push_back({DataShape::Bump, n, 0, std::pow(n, -0.75) / (kTwoPi * n), 0.2});
  }
  RunOptions ro;
  ro.grid_n = 128;
  ro.per_mode = true;
  ro.sample_interval = 0.5;
  const auto strace = run(strip, data, 100.0, 5e-4, ro);
  const auto se = fit_decay(strace, DecayModel::Exponential);
  const auto sp = fit_decay(strace, DecayModel::Polynomial);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < strace.times.size(); ++k) {
    double env = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i)
      env += 2.0 * strace.mode_energies.at(ns[i]).front() * std::exp(2.0 * re_z[i] * strace.times[k]);
    worst = std::min(worst, strace.energies[k] / env);
  }
  const bool strip_ok = se.r2 < sp.r2 && worst >= 0.5;
  return {constant_ok && strip_ok,
          fmt("constant: rate=%.4f (closed form %.1f) r2=%.5f; strip: exp r2=%.5f < poly r2=%.5f "
              "(t^%.3f), envelope ratio min=%.3f (need >= 0.5)",
              cfit.value, modal_rate, cfit.r2, se.r2, sp.r2, sp.value, worst)};
}

Outcome part_two(const AcceptanceOptions& o, Clock::time_point t0) {
  const std::vector<std::pair<const char*, DampingProfile>> profiles = {
      {"zero", DampingProfile::zero()},
      {"constant", DampingProfile::constant(1.0)},
      {"strip", strip_of(o)},
  };
  std::mt19937_64 rng(20261014);
  std::uniform_real_distribution<double> re(-0.4, -0.01), im(1.0, 50.0);
  std::vector<Complex> zs(20);
  for (auto& z : zs) z = {re(rng), im(rng)};
  std::vector<double> s_list;
  for (int s = 5; s <= 100; s += 5) s_list.push_back(s);

  double identity = 0.0;
  bool localized = true;
  std::string constants;
  for (const auto& [name, profile] : profiles) {
    for (int cutoff : {8, 16, 32}) {
      const auto sys = build_system(profile, cutoff);
      const auto rep = check_spectrum_localization(sys);
      localized = localized && rep.holds;
      if (cutoff == 16)
        for (Complex z : zs) identity = std::max(identity, check_resolvent_identity(sys, z));
      if (cutoff == 32) {
        const double c = check_sandwich(sys, s_list).constant;
        localized = localized && std::isfinite(c) && c <= 10.0;
        constants += fmt(" %s:%.4g", name, c);
      }
    }
  }
  const double t = elapsed(t0);
  return {identity <= 1e-10 && localized && t < 300.0,
          fmt("identity=%.3g (need <= 1e-10) localization=%s sandwich C%s (need <= 10) time=%.1fs",
              identity, localized ? "ok" : "failed", constants.c_str(), t)};
}

Outcome resolvent_oracles(const AcceptanceOptions& o, Clock::time_point) {
  ResolventOptions ro;
  ro.richardson = true;
  const auto s_free = offset_grid(1.0, 60.0, 16);
  const auto free_scan = scan_and_fit(DampingProfile::zero(), s_free, {1.0, 60.0}, ro);
  double rel = 0.0;
  for (std::size_t i = 0; i < s_free.size(); ++i) {
    const double exact = free_resolvent_norm(s_free[i], default_mode_cutoff(s_free[i]));
    rel = std::max(rel, std::abs(free_scan.norms[i] / exact - 1.0));
  }

  std::vector<double> s_branch;
  for (int n : {8, 10, 12, 14, 17, 20, 24, 28, 33, 40, 47}) {
    auto params = branch_params(o, Parity::Even, 0);
    params.n = n;
    const double s = solve_branch_at_h(params, 1.0 / (kTwoPi * n)).z.imag();
    if (s >= 50.0 && s <= 300.0) s_branch.push_back(s);
  }
  const auto strip_scan = scan_and_fit(strip_of(o), s_branch, {50.0, 300.0});
  return {rel <= 1e-6 && strip_scan.fitted_exponent >= 0.4,
          fmt("free max rel=%.3g (need <= 1e-6); strip exponent=%.4f (need >= 0.4) over %zu "
              "frequencies in [%.1f, %.1f]",
              rel, strip_scan.fitted_exponent, s_branch.size(), s_branch.front(), s_branch.back())};
}

struct Criterion {
  const char* title;
  Outcome (*check)(const AcceptanceOptions&, Clock::time_point);
};

const Criterion kCriteria[kCriterionCount] = {
    {"branch asymptotic order", branch_order},
    {"branch scaling constant", branch_scaling},
    {"cross-solver agreement", cross_solver},
    {"spectral sanity", spectral_sanity},
    {"quasimode lower bound", lower_bound},
    {"dissipation identity", dissipation},
    {"comparative decay", comparative_decay},
    {"semigroup identities", part_two},
    {"resolvent oracles", resolvent_oracles},
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > kCriterionCount) raise(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.title = kCriteria[id - 1].title;
  const auto t0 = Clock::now();
  try {
    const Outcome out = kCriteria[id - 1].check(options, t0);
    r.pass = out.pass;
    r.detail = out.detail;
  } catch (const Error& e) {
    r.pass = false;
    r.detail = e.what();
  }
  r.seconds = elapsed(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s  %d  %-24s %s  (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
             r.detail.c_str(), r.seconds);
}

}  // namespace dwsl::cli
