// SPDX-License-Identifier: Apache-2.0
#include "dwsl/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/parallel.hpp"
#include "dwsl/quadrature.hpp"

namespace dwsl {
namespace {

struct Segment {
  double a, c;
  int steps;
};

std::vector<Segment> make_segments(const DampingProfile& profile, int steps) {
  std::vector<double> br{-0.5};
  for (double j : profile.jumps())
    if (j > -0.5 && j < 0.5) br.push_back(j);
  br.push_back(0.5);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  std::vector<Segment> seg;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double len = br[i + 1] - br[i];
    int s = 2 * std::max(1, static_cast<int>(std::lround(0.5 * steps * len)));
    seg.push_back({br[i], br[i + 1], s});
  }
  return seg;
}

// Column (v, v') with its z-derivative (dv, dv').
struct Column {
  Complex v, w, dv, dw;
};

struct Coefficients {
  Complex q, qz;
};

inline Column rhs(const Column& c, const Coefficients& k) {
  return {c.w, k.q * c.v, c.dw, k.q * c.dv + k.qz * c.v};
}

inline Column axpy(const Column& c, double h, const Column& d) {
  return {c.v + h * d.v, c.w + h * d.w, c.dv + h * d.dv, c.dw + h * d.dw};
}

class Integrator {
 public:
  Integrator(Complex z, double n, const DampingProfile& profile)
      : z_(z), base_(z * z + 4.0 * kPi * kPi * n * n), profile_(profile) {}

  Coefficients at(double b) const { return {z_ * b + base_, b + 2.0 * z_}; }

  // Advances the columns across one segment; visit(x, columns) sees every node.
  template <std::size_t N, class Visit>
  void run(const Segment& s, std::array<Column, N>& cols, Visit&& visit) const {
    const double h = (s.c - s.a) / s.steps;
    Coefficients left = at(profile_.limit(s.a, +1));
    for (int i = 0; i < s.steps; ++i) {
      double x0 = s.a + i * h;
      double x1 = i + 1 == s.steps ? s.c : s.a + (i + 1) * h;
      Coefficients mid = at(profile_(x0 + 0.5 * h));
      Coefficients right = at(i + 1 == s.steps ? profile_.limit(s.c, -1) : profile_(x1));
      for (auto& c : cols) {
        Column k1 = rhs(c, left);
        Column k2 = rhs(axpy(c, 0.5 * h, k1), mid);
        Column k3 = rhs(axpy(c, 0.5 * h, k2), mid);
        Column k4 = rhs(axpy(c, h, k3), right);
        c.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
        c.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        c.dv += h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        c.dw += h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
      }
      visit(x1, cols);
      left = right;
    }
  }

 private:
  Complex z_, base_;
  const DampingProfile& profile_;
};

double omega_scale(Complex z, double n, const DampingProfile& profile) {
  Complex base = z * z + 4.0 * kPi * kPi * n * n;
  double qmax = std::max(std::abs(z * profile.min_value() + base),
                         std::abs(z * profile.max_value() + base));
  return std::sqrt(qmax);
}

int even_at_least(double v, int floor_value) {
  double c = std::max(static_cast<double>(floor_value), std::ceil(v));
  int s = static_cast<int>(std::min(c, 1e8));
  return s + (s % 2);
}

Characteristic from_matrix(const MonodromyResult& r, Boundary bc) {
  switch (bc) {
    case Boundary::Periodic: return {2.0 - r.m[0] - r.m[3], -(r.dm_dz[0] + r.dm_dz[3])};
    case Boundary::Dirichlet: return {r.m[1], r.dm_dz[1]};
    case Boundary::Neumann: return {r.m[2], r.dm_dz[2]};
  }
  return {};
}

void reconstruct_mode(EigenSolution& sol, const DampingProfile& profile, Boundary bc, int steps) {
  MonodromyResult r = monodromy_matrix(sol.z, sol.n, profile, steps);
  Complex c0, c1;
  if (bc == Boundary::Dirichlet) {
    c0 = 0.0;
    c1 = 1.0;
  } else if (bc == Boundary::Neumann) {
    c0 = 1.0;
    c1 = 0.0;
  } else {
    // null vector of M - I
    Complex a0 = r.m[1], a1 = 1.0 - r.m[0];
    Complex b0 = 1.0 - r.m[3], b1 = r.m[2];
    if (std::norm(a0) + std::norm(a1) >= std::norm(b0) + std::norm(b1)) {
      c0 = a0;
      c1 = a1;
    } else {
      c0 = b0;
      c1 = b1;
    }
    double nc = std::sqrt(std::norm(c0) + std::norm(c1));
    if (nc == 0.0) {
      c0 = 1.0;
      c1 = 0.0;
    } else {
      c0 /= nc;
      c1 /= nc;
    }
  }
  Integrator integ(sol.z, sol.n, profile);
  auto segs = make_segments(profile, steps);
  std::array<Column, 1> col{Column{c0, c1, 0.0, 0.0}};
  sol.x.assign(1, -0.5);
  sol.mode.assign(1, c0);
  sol.segment_ends.clear();
  for (const auto& s : segs) {
    integ.run(s, col, [&](double x, const std::array<Column, 1>& c) {
      sol.x.push_back(x);
      sol.mode.push_back(c[0].v);
    });
    sol.segment_ends.push_back(static_cast<int>(sol.x.size()) - 1);
  }
  double vmax = 0.0;
  for (const auto& v : sol.mode) vmax = std::max(vmax, std::abs(v));
  if (vmax > 0.0)
    for (auto& v : sol.mode) v /= vmax;
  const double omega = std::max(1.0, omega_scale(sol.z, sol.n, profile));
  Complex v_end = col[0].v / vmax, w_end = col[0].w / vmax;
  Complex v_start = c0 / vmax, w_start = c1 / vmax;
  switch (bc) {
    case Boundary::Periodic:
      sol.boundary_mismatch =
          std::max(std::abs(v_end - v_start), std::abs(w_end - w_start) / omega);
      break;
    case Boundary::Dirichlet:
      sol.boundary_mismatch = std::max(std::abs(v_start), std::abs(v_end));
      break;
    case Boundary::Neumann:
      sol.boundary_mismatch = std::max(std::abs(w_start), std::abs(w_end)) / omega;
      break;
  }
}

void check_geometry(Geometry g) {
  if (!g.valid()) raise(ErrorCode::InvalidArgument, "torus needs periodic, square needs Dirichlet/Neumann");
}

}  // namespace

int default_steps(Complex z, double n, const DampingProfile& profile, StepAccuracy accuracy) {
  const double w = omega_scale(z, n, profile);
  if (accuracy == StepAccuracy::Coarse) return even_at_least(16.0 * w, 256);
  return even_at_least(302.0 * std::pow(w, 1.25), 4096);
}

MonodromyResult monodromy_matrix(Complex z, double n, const DampingProfile& profile, int steps) {
  if (steps < 64 || steps % 2 != 0) raise(ErrorCode::InvalidArgument, "steps must be even and >= 64");
  Integrator integ(z, n, profile);
  std::array<Column, 2> cols{Column{1.0, 0.0, 0.0, 0.0}, Column{0.0, 1.0, 0.0, 0.0}};
  MonodromyResult out;
  for (const auto& s : make_segments(profile, steps)) {
    integ.run(s, cols, [](double, const std::array<Column, 2>&) {});
    out.steps += s.steps;
  }
  out.m = {cols[0].v, cols[1].v, cols[0].w, cols[1].w};
  out.dm_dz = {cols[0].dv, cols[1].dv, cols[0].dw, cols[1].dw};
  for (int i = 0; i < 4; ++i)
    if (!(std::abs(out.m[i]) <= 1e300) || !(std::abs(out.dm_dz[i]) <= 1e300)) out.overflow = true;
  return out;
}

Characteristic characteristic(Complex z, double n, const DampingProfile& profile, Geometry geometry,
                              int steps) {
  check_geometry(geometry);
  if (steps == 0) steps = default_steps(z, n, profile, StepAccuracy::Fine);
  return from_matrix(monodromy_matrix(z, n, profile, steps), geometry.boundary);
}

EigenSolution newton_refine(Complex z0, double n, const DampingProfile& profile, Geometry geometry,
                            const NewtonOptions& opt) {
  check_geometry(geometry);
  if (opt.multiplicity < 1) raise(ErrorCode::InvalidArgument, "multiplicity must be >= 1");
  auto steps_at = [&](Complex z) {
    return opt.steps > 0 ? opt.steps : default_steps(z, n, profile, StepAccuracy::Fine);
  };
  Complex z = z0;
  Characteristic c = characteristic(z, n, profile, geometry, steps_at(z));
  int it = 0;
  const double mult = opt.multiplicity;
  const double eps = std::numeric_limits<double>::epsilon();
  for (; it < opt.max_iterations; ++it) {
    if (std::abs(c.f) < 1e-300) break;
    if (std::abs(c.df_dz) < 1e-14) {
      if (std::abs(c.f) <= opt.tolerance) break;
      raise(ErrorCode::DegenerateDerivative,
            "|dF/dz| < 1e-14 at z = " + format_double(z.real()) + " + " + format_double(z.imag()) +
                "i (possible multiple eigenvalue)");
    }
    Complex step = mult * c.f / c.df_dz;
    Complex zn = z - step;
    Characteristic cn = characteristic(zn, n, profile, geometry, steps_at(zn));
    for (int halve = 0; halve < 20 && !(std::abs(cn.f) < std::abs(c.f)) &&
                        std::abs(c.f) > opt.tolerance;
         ++halve) {
      step *= 0.5;
      zn = z - step;
      cn = characteristic(zn, n, profile, geometry, steps_at(zn));
    }
    bool converged = std::abs(step) <= 8.0 * eps * std::max(1.0, std::abs(z));
    bool stalled = !(std::abs(cn.f) < std::abs(c.f));
    if (stalled && std::abs(c.f) <= opt.tolerance) break;
    z = zn;
    c = cn;
    if (converged) {
      ++it;
      break;
    }
  }
  if (!(std::abs(c.f) <= opt.tolerance))
    raise(ErrorCode::NoConvergence, "Newton residual " + format_double(std::abs(c.f)) +
                                        " after " + std::to_string(it) + " iterations");
  EigenSolution sol;
  sol.z = z;
  sol.n = n;
  sol.multiplicity = opt.multiplicity;
  sol.residual = std::abs(c.f);
  sol.newton_iterations = it;
  if (opt.reconstruct_mode) reconstruct_mode(sol, profile, geometry.boundary, steps_at(z));
  return sol;
}

namespace {

// Contour samples on a rectangle, edge by edge, nested under doubling.
class Contour {
 public:
  Contour(const Box& box, double n, const DampingProfile& profile, Geometry geometry, int steps)
      : n_(n), profile_(profile), geometry_(geometry), steps_(steps) {
    corners_ = {Complex(box.re_lo, box.im_lo), Complex(box.re_hi, box.im_lo),
                Complex(box.re_hi, box.im_hi), Complex(box.re_lo, box.im_hi)};
    centre_ = box.center();
  }

  double last_spike() const { return last_spike_; }

  // Returns false when the integrand spikes (a zero sits too close to an edge).
  bool evaluate(int points, WindingResult& out) {
    double perim = 0.0;
    for (int e = 0; e < 4; ++e) perim += std::abs(corners_[(e + 1) % 4] - corners_[e]);
    Complex total{}, m1{}, m2{};
    double spike = 0.0;
    for (int e = 0; e < 4; ++e) {
      Complex a = corners_[e], b = corners_[(e + 1) % 4];
      int ne = std::max(8, static_cast<int>(std::lround(points * std::abs(b - a) / perim)));
      ne += ne % 2;
      auto& cache = cache_[e];
      if (static_cast<int>(cache.size()) != ne + 1) {
        std::vector<Characteristic> fresh(ne + 1);
        bool nested = !cache.empty() && static_cast<int>(cache.size() - 1) * 2 == ne;
        for (int j = 0; j <= ne; ++j) {
          if (nested && j % 2 == 0) {
            fresh[j] = cache[j / 2];
            continue;
          }
          Complex z = a + (b - a) * (static_cast<double>(j) / ne);
          fresh[j] = characteristic(z, n_, profile_, geometry_, steps_);
        }
        cache = std::move(fresh);
      }
      Complex dz = (b - a) / static_cast<double>(ne);
      for (int j = 0; j <= ne; ++j) {
        Complex z = a + (b - a) * (static_cast<double>(j) / ne);
        const auto& c = cache[j];
        if (std::abs(c.f) < 1e-300) return false;
        Complex g = c.df_dz / c.f;
        spike = std::max(spike, std::abs(g * dz));
        double w = (j == 0 || j == ne) ? 0.5 : 1.0;
        total += w * g * dz;
        Complex u = z - centre_;
        m1 += w * u * g * dz;
        m2 += w * u * u * g * dz;
      }
    }
    Complex scale = 1.0 / (2.0 * kPi * kI);
    out.raw = (total * scale).real();
    out.count = static_cast<int>(std::lround(out.raw));
    const double k = out.count;
    m1 *= scale;
    m2 *= scale;
    out.first_moment = m1 + centre_ * k;
    out.second_moment = m2 + 2.0 * centre_ * m1 + centre_ * centre_ * k;
    out.points = points;
    last_spike_ = spike;
    return spike < 1.0;
  }

 private:
  double n_;
  const DampingProfile& profile_;
  Geometry geometry_;
  int steps_;
  std::array<Complex, 4> corners_;
  Complex centre_;
  std::array<std::vector<Characteristic>, 4> cache_;
  double last_spike_ = 0.0;
};

int box_steps(const Box& box, double n, const DampingProfile& profile) {
  int s = 0;
  for (Complex z : {Complex(box.re_lo, box.im_lo), Complex(box.re_hi, box.im_lo),
                    Complex(box.re_hi, box.im_hi), Complex(box.re_lo, box.im_hi)})
    s = std::max(s, default_steps(z, n, profile, StepAccuracy::Coarse));
  return s;
}

bool winding_attempt(const Box& box, double n, const DampingProfile& profile, Geometry geometry,
                     int points, int steps, int levels, WindingResult& out) {
  Contour contour(box, n, profile, geometry, steps);
  for (int level = 0, p = points; level < levels; ++level, p *= 2) {
    WindingResult cur;
    bool smooth = contour.evaluate(p, cur);
    if (smooth && std::abs(cur.raw - cur.count) <= 0.01) {
      out = cur;
      return true;
    }
    if (contour.last_spike() > 64.0) return false;
  }
  return false;
}

}  // namespace

WindingResult winding_number(const Box& box, double n, const DampingProfile& profile,
                             Geometry geometry, int points, int steps) {
  check_geometry(geometry);
  if (!(box.re_hi > box.re_lo && box.im_hi > box.im_lo))
    raise(ErrorCode::InvalidArgument, "box must have positive width and height");
  if (points < 16) raise(ErrorCode::InvalidArgument, "need at least 16 boundary points");
  if (steps == 0) steps = box_steps(box, n, profile);
  WindingResult out;
  Box b = box;
  const double nudge = 1e-6 * std::max({1.0, std::abs(box.re_lo), std::abs(box.re_hi),
                                        std::abs(box.im_lo), std::abs(box.im_hi)});
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (winding_attempt(b, n, profile, geometry, points, steps, 5, out)) return out;
    b.re_lo -= nudge;
    b.re_hi += nudge;
    b.im_lo -= nudge;
    b.im_hi += nudge;
  }
  raise(ErrorCode::WindingInconsistency, "winding number did not stabilise on the contour");
}

namespace {

struct CellSearch {
  double n;
  const DampingProfile& profile;
  Geometry geometry;
  const BoxOptions& opt;
  int steps;
  std::vector<EigenSolution> found;

  void reconstruct(EigenSolution& s) {
    reconstruct_mode(s, profile, geometry.boundary,
                     default_steps(s.z, n, profile, StepAccuracy::Fine));
  }

  WindingResult count(const Box& b) {
    return winding_number(b, n, profile, geometry, opt.boundary_points, steps);
  }

  // Cut lines are moved instead of nudged, so children tile the parent.
  bool count_exact(const Box& b, WindingResult& w) {
    return winding_attempt(b, n, profile, geometry, opt.boundary_points, steps, 3, w);
  }

  bool try_newton(const Box& b, Complex seed, int multiplicity) {
    NewtonOptions no;
    no.multiplicity = multiplicity;
    no.reconstruct_mode = opt.reconstruct_modes;
    try {
      EigenSolution s = newton_refine(seed, n, profile, geometry, no);
      double slack = 1e-9 * std::max(1.0, std::abs(s.z));
      if (!b.contains(s.z, slack)) return false;
      found.push_back(std::move(s));
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::DegenerateDerivative)
        return false;
      throw;
    }
  }

  // A cell holding several zeros that all fit in a cluster_tolerance box is
  // reported once with its multiplicity at the modified-Newton location.
  bool try_cluster(const Box& b, Complex seed, int count_in_cell) {
    NewtonOptions no;
    no.multiplicity = count_in_cell;
    no.reconstruct_mode = false;
    EigenSolution s;
    try {
      s = newton_refine(seed, n, profile, geometry, no);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence || e.code() == ErrorCode::DegenerateDerivative)
        return false;
      throw;
    }
    if (!b.contains(s.z)) return false;
    const double r = opt.cluster_tolerance;
    Box small{s.z.real() - r, s.z.real() + r, s.z.imag() - r, s.z.imag() + r};
    WindingResult ws;
    try {
      ws = winding_number(small, n, profile, geometry, opt.boundary_points,
                          default_steps(s.z, n, profile, StepAccuracy::Fine));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::WindingInconsistency) return false;
      throw;
    }
    if (ws.count != count_in_cell) return false;
    s.multiplicity = count_in_cell;
    s.residual = std::abs(characteristic(s.z, n, profile, geometry).f);
    if (opt.reconstruct_modes) reconstruct(s);
    found.push_back(std::move(s));
    return true;
  }

  void split(const Box& b, const WindingResult& w, int depth) {
    const bool vertical_cut = (b.re_hi - b.re_lo) >= (b.im_hi - b.im_lo);
    for (double frac : {0.5137, 0.4711, 0.5, 0.5519, 0.4406}) {
      Box lo = b, hi = b;
      if (vertical_cut) {
        double c = b.re_lo + frac * (b.re_hi - b.re_lo);
        lo.re_hi = c;
        hi.re_lo = c;
      } else {
        double c = b.im_lo + frac * (b.im_hi - b.im_lo);
        lo.im_hi = c;
        hi.im_lo = c;
      }
      WindingResult wl, wh;
      if (!count_exact(lo, wl) || !count_exact(hi, wh)) continue;
      if (wl.count + wh.count != w.count) continue;
      search(lo, wl, depth + 1);
      search(hi, wh, depth + 1);
      return;
    }
    raise(ErrorCode::WindingInconsistency, "child winding counts disagree with the parent cell");
  }

  void search(const Box& b, const WindingResult& w, int depth) {
    if (w.count < 0) raise(ErrorCode::WindingInconsistency, "negative winding count");
    if (w.count == 0) return;
    const double size = std::max(b.re_hi - b.re_lo, b.im_hi - b.im_lo);
    if (w.count == 1) {
      if (try_newton(b, b.center(), 1)) return;
      if (try_newton(b, w.first_moment, 1)) return;
    } else {
      Complex mean = w.first_moment / static_cast<double>(w.count);
      Complex var = w.second_moment / static_cast<double>(w.count) - mean * mean;
      double spread = std::sqrt(std::abs(var));
      if (spread <= 0.25 * size && try_cluster(b, mean, w.count))
        return;
      if (size < 1e-7 * (1.0 + std::abs(b.center())))
        raise(ErrorCode::DegenerateDerivative, "unresolved cluster of " + std::to_string(w.count) +
                                                   " zeros near " + format_double(mean.real()) +
                                                   " + " + format_double(mean.imag()) + "i");
    }
    if (depth >= opt.max_depth)
      raise(ErrorCode::WindingInconsistency, "subdivision depth exhausted");
    split(b, w, depth);
  }
};

}  // namespace

std::vector<EigenSolution> spectrum_in_box(const Box& box, std::span<const double> n_values,
                                           const DampingProfile& profile, Geometry geometry,
                                           const BoxOptions& opt) {
  check_geometry(geometry);
  std::vector<std::vector<EigenSolution>> per_n(n_values.size());
  parallel_for(n_values.size(), [&](std::size_t i) {
    const double n = n_values[i];
    CellSearch cs{n, profile, geometry, opt, box_steps(box, n, profile), {}};
    WindingResult w = cs.count(box);
    cs.search(box, w, 0);
    std::vector<EigenSolution> unique;
    for (auto& s : cs.found) {
      bool dup = false;
      for (const auto& u : unique)
        if (std::abs(u.z - s.z) <= opt.dedup_tolerance) dup = true;
      if (!dup) unique.push_back(std::move(s));
    }
    per_n[i] = std::move(unique);
  });
  std::vector<EigenSolution> all;
  for (auto& v : per_n)
    for (auto& s : v) all.push_back(std::move(s));
  std::stable_sort(all.begin(), all.end(), [](const EigenSolution& a, const EigenSolution& b) {
    if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.n < b.n;
  });
  return all;
}

double rayleigh_real_part(const EigenSolution& sol, const DampingProfile& profile) {
  if (sol.mode.empty()) raise(ErrorCode::InvalidArgument, "solution carries no mode samples");
  double num = 0.0, den = 0.0;
  int start = 0;
  for (int end : sol.segment_ends) {
    const int count = end - start + 1;
    const double h = (sol.x[end] - sol.x[start]) / (count - 1);
    std::vector<double> v2(count), bv2(count);
    for (int j = 0; j < count; ++j) {
      double x = sol.x[start + j];
      int side = j == 0 ? +1 : (j == count - 1 ? -1 : 0);
      double b = side == 0 ? profile(x) : profile.limit(x, side);
      v2[j] = std::norm(sol.mode[start + j]);
      bv2[j] = b * v2[j];
    }
    den += simpson<double>(v2, h);
    num += simpson<double>(bv2, h);
    start = end;
  }
  return -0.5 * num / den;
}

}  // namespace dwsl
