// SPDX-License-Identifier: Apache-2.0
#include "dwsl/strip_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/quadrature.hpp"

namespace dwsl {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void validate(const BranchParams& p) {
  if (!(p.strength > 0.0) || !std::isfinite(p.strength))
    raise(ErrorCode::InvalidArgument, "strength must be > 0");
  if (!(p.half_width > 0.0 && p.half_width < 0.5))
    raise(ErrorCode::InvalidArgument, "half_width must lie in (0, 1/2)");
  if (p.m < 0) raise(ErrorCode::InvalidArgument, "m must be >= 0");
  if (p.parity == Parity::Odd && p.m == 0)
    raise(ErrorCode::OddMZero, "odd parity has no m = 0 branch");
  if (p.n && !(*p.n >= 0.0)) raise(ErrorCode::InvalidArgument, "n must be >= 0");
}

// tan without overflow for large |Im w|.
Complex safe_tan(Complex w) {
  if (std::abs(w.imag()) < 20.0) return std::tan(w);
  if (w.imag() < 0.0) {
    Complex e = std::exp(-2.0 * kI * w);
    return -kI * (1.0 - e) / (1.0 + e);
  }
  Complex e = std::exp(2.0 * kI * w);
  return kI * (1.0 - e) / (1.0 + e);
}

// Trig values written as exp(i s a) * mantissa with a common sign s, so that
// ratios never overflow.
struct Scaled {
  Complex exponent, mantissa;
};

Scaled scaled_cos(Complex a, double s) {
  return {kI * s * a, (1.0 + std::exp(-2.0 * kI * s * a)) * 0.5};
}

Scaled scaled_sin(Complex a, double s) {
  return {kI * s * a, s * (1.0 - std::exp(-2.0 * kI * s * a)) / (2.0 * kI)};
}

Complex ratio(const Scaled& num, const Scaled& den) {
  return std::exp(num.exponent - den.exponent) * num.mantissa / den.mantissa;
}

struct Cleared {
  Complex g, dg, k_damped;
};

// G = cos(k sigma) F is free of the tan(k sigma) poles that sit next to
// the small-h roots.
Cleared cleared_residual(Complex k, double h, Complex coupling, const BranchParams& p) {
  const double sg = p.half_width, sp = p.outer_half_width();
  Complex kp = principal_sqrt((h * k) * (h * k) - kI * h * coupling) / h;
  Complex dkp = k / kp;
  Complex s = std::sin(k * sg), c = std::cos(k * sg), t = safe_tan(kp * sp);
  Complex r, dr;
  if (p.parity == Parity::Even) {
    r = kp / k;
    dr = (dkp * k - kp) / (k * k);
  } else {
    r = k / kp;
    dr = (kp - k * dkp) / (kp * kp);
  }
  Complex dt = sp * (1.0 + t * t) * dkp;
  Cleared out;
  out.g = s + r * c * t;
  out.dg = sg * c + dr * c * t - r * sg * s * t + r * c * dt;
  out.k_damped = kp;
  return out;
}

struct State {
  double h = 0.0;
  double delta = 0.0;  // rho - 1 with rho = 2 pi h n
  Complex k, zeta_tilde;
  int newton = 0;
};

Complex zeta_of(Complex k, double h, double delta) {
  return 0.5 * h * k * k + delta * (2.0 + delta) / (2.0 * h);
}

Complex zeta_tilde_of(Complex zeta, double h) {
  return 2.0 * zeta / (1.0 + principal_sqrt(1.0 + 2.0 * h * zeta));
}

bool newton_k(Complex& k, double h, Complex coupling, const BranchParams& p, int& iters) {
  Cleared cur = cleared_residual(k, h, coupling, p);
  for (int it = 0; it < 50; ++it) {
    double scale = 1.0 + std::abs(cur.k_damped / k);
    if (std::abs(cur.g) <= 1e-15 * scale) return true;
    if (cur.dg == Complex{} || !std::isfinite(std::abs(cur.dg))) return false;
    Complex step = cur.g / cur.dg;
    double lam = 1.0;
    Cleared next;
    Complex kn;
    for (int halve = 0; halve < 30; ++halve) {
      kn = k - lam * step;
      next = cleared_residual(kn, h, coupling, p);
      if (std::isfinite(std::abs(next.g)) && std::abs(next.g) < std::abs(cur.g)) break;
      lam *= 0.5;
    }
    ++iters;
    bool tiny_step = std::abs(kn - k) <= 4.0 * kEps * std::abs(k);
    k = kn;
    cur = next;
    if (tiny_step) return std::abs(cur.g) <= 1e-11 * scale;
  }
  return std::abs(cur.g) <= 1e-11 * (1.0 + std::abs(cur.k_damped / k));
}

bool solve_state(const BranchParams& p, State& s) {
  const double tol = 1e-12 + 64.0 * kEps / s.h;
  for (int outer = 0; outer < 60; ++outer) {
    Complex coupling = p.strength * (1.0 + s.h * s.zeta_tilde);
    if (!newton_k(s.k, s.h, coupling, p, s.newton)) return false;
    Complex zt = zeta_tilde_of(zeta_of(s.k, s.h, s.delta), s.h);
    bool done = std::abs(zt - s.zeta_tilde) <= tol;
    s.zeta_tilde = zt;
    if (done) return true;
  }
  return false;
}

double branch_k0(const BranchParams& p) {
  return p.parity == Parity::Even ? kPi * (p.m + 0.5) / p.half_width : kPi * p.m / p.half_width;
}

// Moves a converged state to (h_to, delta_to) in geometric h steps with
// delta linear in h along the path.
State continue_state(const BranchParams& p, State from, double h_to, double delta_to,
                     int& steps) {
  const double h_from = from.h, delta_from = from.delta;
  auto delta_at = [&](double h) {
    if (h_to == h_from) return delta_to;
    return delta_from + (delta_to - delta_from) * (h - h_from) / (h_to - h_from);
  };
  State prev = from, prev2 = from;
  bool have_two = false;
  double factor = 1.05;
  const bool up = h_to > h_from;
  while (prev.h != h_to) {
    double hn = up ? std::min(h_to, prev.h * factor) : std::max(h_to, prev.h / factor);
    Complex k_pred = prev.k, zt_pred = prev.zeta_tilde;
    if (have_two) {
      double w = std::log(hn / prev.h) / std::log(prev.h / prev2.h);
      k_pred = prev.k + w * (prev.k - prev2.k);
      zt_pred = prev.zeta_tilde + w * (prev.zeta_tilde - prev2.zeta_tilde);
    }
    State trial;
    trial.h = hn;
    trial.delta = hn == h_to ? delta_to : delta_at(hn);
    trial.k = k_pred;
    trial.zeta_tilde = zt_pred;
    trial.newton = prev.newton;
    bool ok = solve_state(p, trial) && std::abs(trial.k - k_pred) <= 0.05 * std::abs(k_pred);
    if (!ok) {
      factor = std::sqrt(factor);
      if (factor - 1.0 < 1e-5)
        raise(ErrorCode::NoConvergence,
              "branch continuation stalled near h = " + format_double(prev.h) +
                  " on the way to h = " + format_double(h_to));
      continue;
    }
    ++steps;
    prev2 = prev;
    prev = trial;
    have_two = true;
    factor = std::min(1.1, factor * factor);
  }
  return prev;
}

QuantizationRoot finalize(const BranchParams& p, const State& s, int steps) {
  QuantizationRoot r;
  r.h = s.h;
  r.n = (1.0 + s.delta) / (kTwoPi * s.h);
  r.k = s.k;
  r.energy = (s.h * s.k) * (s.h * s.k);
  r.zeta = zeta_of(s.k, s.h, s.delta);
  r.zeta_tilde = zeta_tilde_of(r.zeta, s.h);
  r.coupling = p.strength * (1.0 + s.h * r.zeta_tilde);
  r.k_damped = wavevectors(r.energy, s.h, r.coupling).k_damped;
  r.z = kI * (1.0 / s.h + r.zeta_tilde);
  r.residual = std::abs(quantization_residual(r.k, s.h, r.coupling, p));
  r.newton_iterations = s.newton;
  r.continuation_steps = steps;
  return r;
}

double target_delta(const BranchParams& p, double h) {
  double n = p.n ? *p.n : default_vertical_index(h);
  return kTwoPi * h * n - 1.0;
}

State seed_state(const BranchParams& p, double h, double delta) {
  State s;
  s.h = h;
  s.delta = delta;
  Complex c = std::exp(kI * (0.75 * kPi)) / (p.half_width * std::sqrt(p.strength));
  s.k = branch_k0(p) * (1.0 + std::sqrt(h) * c);
  s.zeta_tilde = zeta_tilde_of(zeta_of(s.k, h, delta), h);
  if (!solve_state(p, s))
    raise(ErrorCode::NoConvergence, "Newton failed at the asymptotic seed, h = " + format_double(h));
  return s;
}

}  // namespace

double default_vertical_index(double h) {
  if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be > 0");
  return std::max(1.0, std::round(1.0 / (kTwoPi * h)));
}

Wavevectors wavevectors(Complex energy, double h, Complex coupling) {
  if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be > 0");
  return {principal_sqrt(energy) / h, principal_sqrt(energy - kI * h * coupling) / h};
}

Complex quantization_residual(Complex k, double h, Complex coupling, const BranchParams& p) {
  if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be > 0");
  const double sg = p.half_width, sp = p.outer_half_width();
  Complex kp = wavevectors((h * k) * (h * k), h, coupling).k_damped;
  if (std::abs(std::cos(k * sg)) < 1e-12)
    raise(ErrorCode::PoleProximity, "k sigma sits on a pole of tan");
  if (std::abs(kp.imag() * sp) < 20.0 && std::abs(std::cos(kp * sp)) < 1e-12)
    raise(ErrorCode::PoleProximity, "k' sigma' sits on a pole of tan");
  Complex r = p.parity == Parity::Even ? kp / k : k / kp;
  return std::tan(k * sg) + r * safe_tan(kp * sp);
}

QuantizationRoot solve_branch_at_h(const BranchParams& p, double h) {
  validate(p);
  if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be > 0");
  const double delta = target_delta(p, h);
  const double eps_h = 0.02 * p.half_width * std::sqrt(p.strength);
  const double h0 = std::min(1e-5, eps_h * eps_h);
  int steps = 0;
  if (h <= h0) return finalize(p, seed_state(p, h, delta), steps);
  State s = seed_state(p, h0, delta * h0 / h);
  s = continue_state(p, s, h, delta, steps);
  return finalize(p, s, steps);
}

double asymptotic_im_zeta(const BranchParams& p, double h) {
  validate(p);
  if (!(h >= 0.0)) raise(ErrorCode::InvalidArgument, "h must be >= 0");
  double q = p.parity == Parity::Even ? kPi * (p.m + 0.5) : kPi * p.m;
  return std::pow(h, 1.5) * q * q /
         (p.half_width * p.half_width * p.half_width * std::sqrt(2.0 * p.strength));
}

double scaling_diagnostic(Complex z) { return std::abs(z.real()) * std::pow(std::abs(z.imag()), 1.5); }

std::vector<BranchPoint> branch(const BranchParams& p, std::span<const double> h_list) {
  validate(p);
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1]))
      raise(ErrorCode::InvalidArgument, "h_list must be strictly descending");
  std::vector<BranchPoint> out;
  if (h_list.empty()) return out;
  auto emit = [&](const QuantizationRoot& r) {
    BranchPoint bp;
    bp.root = r;
    bp.asymptotic_im_zeta = asymptotic_im_zeta(p, r.h);
    bp.scaling = scaling_diagnostic(r.z);
    out.push_back(bp);
  };
  QuantizationRoot first = solve_branch_at_h(p, h_list[0]);
  emit(first);
  State s;
  s.h = first.h;
  s.delta = target_delta(p, first.h);
  s.k = first.k;
  s.zeta_tilde = first.zeta_tilde;
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    int steps = 0;
    s.newton = 0;
    s = continue_state(p, s, h_list[i], target_delta(p, h_list[i]), steps);
    emit(finalize(p, s, steps));
  }
  return out;
}

Complex mode_value(const QuantizationRoot& root, const BranchParams& p, double x) {
  x = x - std::floor(x + 0.5);
  const double sg = p.half_width, sp = p.outer_half_width();
  const double ax = std::abs(x);
  const Complex k = root.k, kp = root.k_damped;
  if (p.parity == Parity::Even) {
    if (ax <= sg) return std::cos(k * x);
    double s = kp.imag() < 0.0 ? 1.0 : -1.0;
    return std::cos(k * sg) * ratio(scaled_cos(kp * (0.5 - ax), s), scaled_cos(kp * sp, s));
  }
  if (ax <= sg) return std::sin(k * x);
  double s = kp.imag() < 0.0 ? 1.0 : -1.0;
  double sgn = x < 0.0 ? -1.0 : 1.0;
  return sgn * std::sin(k * sg) * ratio(scaled_sin(kp * (0.5 - ax), s), scaled_sin(kp * sp, s));
}

Complex mode_derivative(const QuantizationRoot& root, const BranchParams& p, double x) {
  x = x - std::floor(x + 0.5);
  const double sg = p.half_width, sp = p.outer_half_width();
  const double ax = std::abs(x);
  const Complex k = root.k, kp = root.k_damped;
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  double s = kp.imag() < 0.0 ? 1.0 : -1.0;
  if (p.parity == Parity::Even) {
    if (ax <= sg) return -k * std::sin(k * x);
    return sgn * std::cos(k * sg) * kp *
           ratio(scaled_sin(kp * (0.5 - ax), s), scaled_cos(kp * sp, s));
  }
  if (ax <= sg) return k * std::cos(k * x);
  return -std::sin(k * sg) * kp * ratio(scaled_cos(kp * (0.5 - ax), s), scaled_sin(kp * sp, s));
}

ModeSamples mode_profile(const QuantizationRoot& root, const BranchParams& p, int samples) {
  if (samples < 2) raise(ErrorCode::InvalidArgument, "samples must be >= 2");
  const double sp = p.outer_half_width();
  const Complex kp = root.k_damped;
  if (std::abs(kp.imag() * sp) < 20.0) {
    Complex d = p.parity == Parity::Even ? std::cos(kp * sp) : std::sin(kp * sp);
    if (std::abs(d) < 1e-12) raise(ErrorCode::PoleProximity, "junction amplitude is singular");
  }
  ModeSamples out;
  out.x.resize(samples);
  out.v.resize(samples);
  for (int j = 0; j < samples; ++j) {
    double x = -0.5 + static_cast<double>(j) / samples;
    out.x[j] = x;
    out.v[j] = mode_value(root, p, x);
  }
  return out;
}

double junction_mismatch(const QuantizationRoot& root, const BranchParams& p) {
  const double sg = p.half_width, sp = p.outer_half_width();
  const Complex k = root.k, kp = root.k_damped;
  double s = kp.imag() < 0.0 ? 1.0 : -1.0;
  Complex v_in, dv_in, v_out, dv_out;
  if (p.parity == Parity::Even) {
    v_in = std::cos(k * sg);
    dv_in = -k * std::sin(k * sg);
    v_out = std::cos(k * sg);
    dv_out = std::cos(k * sg) * kp * ratio(scaled_sin(kp * sp, s), scaled_cos(kp * sp, s));
  } else {
    v_in = std::sin(k * sg);
    dv_in = k * std::cos(k * sg);
    v_out = std::sin(k * sg);
    dv_out = -std::sin(k * sg) * kp * ratio(scaled_cos(kp * sp, s), scaled_sin(kp * sp, s));
  }
  double scale = std::max({std::abs(v_in), std::abs(dv_in) / std::abs(k), 1e-300});
  return std::max(std::abs(v_in - v_out), std::abs(dv_in - dv_out) / std::abs(k)) / scale;
}

double rayleigh_real_part(const QuantizationRoot& root, const BranchParams& p, int points) {
  if (points < 3 || points % 2 == 0)
    raise(ErrorCode::InvalidArgument, "points_per_piece must be odd and >= 3");
  const double sg = p.half_width, sp = p.outer_half_width();
  std::vector<double> inner(points), outer(points);
  for (int j = 0; j < points; ++j) {
    inner[j] = std::norm(mode_value(root, p, sg * j / (points - 1)));
    outer[j] = std::norm(mode_value(root, p, sg + sp * j / (points - 1)));
  }
  double in = simpson<double>(inner, sg / (points - 1));
  double out = simpson<double>(outer, sp / (points - 1));
  return -0.5 * p.strength * out / (in + out);
}

QuantizationRoot square_spectrum(const BranchParams& params, double h, Boundary bc) {
  if (bc == Boundary::Periodic)
    raise(ErrorCode::InvalidArgument, "square_spectrum needs Dirichlet or Neumann");
  BranchParams p = params;
  Parity forced = bc == Boundary::Dirichlet ? Parity::Odd : Parity::Even;
  if (p.parity != forced)
    raise(ErrorCode::ParityMismatch, std::string(to_string(bc)) + " states have " +
                                         to_string(forced) + " parity");
  if (!(h > 0.0)) raise(ErrorCode::InvalidArgument, "h must be > 0");
  if (!p.n) p.n = std::max(0.5, 0.5 * std::round(1.0 / (kPi * h)));
  if (std::abs(2.0 * *p.n - std::round(2.0 * *p.n)) > 0.0)
    raise(ErrorCode::InvalidArgument, "square n must be a half-integer");
  if (bc == Boundary::Dirichlet && *p.n == 0.0)
    raise(ErrorCode::InvalidArgument, "Dirichlet square excludes n = 0");
  return solve_branch_at_h(p, h);
}

}  // namespace dwsl
