// SPDX-License-Identifier: Apache-2.0
#include "dwsl_cli/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <random>

#include "dwsl/config.hpp"
#include "dwsl/csv.hpp"
#include "dwsl/error.hpp"
#include "dwsl/monodromy.hpp"
#include "dwsl/parallel.hpp"
#include "dwsl/quasimode.hpp"
#include "dwsl/resolvent.hpp"
#include "dwsl/semigroup_lab.hpp"
#include "dwsl/strip_spectrum.hpp"
#include "dwsl_cli/acceptance.hpp"

namespace dwsl::cli {
namespace {

using nlohmann::ordered_json;

[[noreturn]] void usage(const std::string& what) { raise(ErrorCode::UsageError, what); }

// "-" maps to the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      out_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) usage("cannot open " + path + " for writing");
    out_ = file_.get();
  }
  std::ostream& stream() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_ = nullptr;
};

void require_torus(const RunConfig& c) {
  if (c.geometry.domain != Domain::Torus)
    usage(std::string(command_name(c.command)) + " runs on the torus only");
}

bool is_auto(const RunConfig& c, const std::string& key) { return c.knob(key) == "auto"; }

Parity parse_parity(const std::string& v) {
  if (v == "even") return Parity::Even;
  if (v == "odd") return Parity::Odd;
  usage("--parity: expected even or odd, got '" + v + "'");
}

void write_json(const ordered_json& j, const std::string& path, std::ostream& diag) {
  Sink sink(path, diag);
  sink.stream() << j.dump(2) << "\n";
}

ordered_json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
          {"rms_residual", f.rms_residual}, {"points", f.points}};
}

int cmd_branch(const RunConfig& c, std::ostream& out) {
  const auto* strip = std::get_if<StripDamping>(&c.profile.kind());
  if (!strip) usage("branch needs --profile strip");
  BranchParams p;
  p.strength = strip->strength;
  p.half_width = strip->half_width;
  p.parity = parse_parity(c.knob("parity"));
  p.m = static_cast<int>(c.knob_int("m"));
  if (!is_auto(c, "n")) p.n = c.knob_double("n");
  auto h = c.knob_list("h");
  if (h.empty()) usage("--h needs at least one value");
  std::sort(h.begin(), h.end(), std::greater<>());
  h.erase(std::unique(h.begin(), h.end()), h.end());

  std::vector<BranchPoint> pts;
  if (c.geometry.domain == Domain::Torus) {
    pts = branch(p, h);
  } else {
    for (double hv : h) {
      BranchPoint bp;
      bp.root = square_spectrum(p, hv, c.geometry.boundary);
      bp.asymptotic_im_zeta = asymptotic_im_zeta(p, hv);
      bp.scaling = scaling_diagnostic(bp.root.z);
      pts.push_back(bp);
    }
  }
  Sink sink(c.output, out);
  CsvWriter csv(sink.stream(), {"h", "n", "parity", "m", "re_z", "im_z", "re_zeta_tilde",
                                "im_zeta_tilde", "asymptotic_im_zeta", "scaling", "residual",
                                "newton_iterations"});
  for (const auto& bp : pts) {
    const auto& r = bp.root;
    csv.row() << r.h << r.n << to_string(p.parity) << p.m << r.z.real() << r.z.imag()
              << r.zeta_tilde.real() << r.zeta_tilde.imag() << bp.asymptotic_im_zeta << bp.scaling
              << r.residual << r.newton_iterations;
  }
  return 0;
}

int cmd_spectrum_box(const RunConfig& c, std::ostream& out) {
  const Box box{c.knob_double("re_lo"), c.knob_double("re_hi"), c.knob_double("im_lo"),
                c.knob_double("im_hi")};
  if (!(box.re_lo < box.re_hi && box.im_lo < box.im_hi)) usage("empty box");
  const auto ns = c.knob_list("n");
  if (ns.empty()) usage("--n needs at least one value");
  BoxOptions bo;
  bo.boundary_points = static_cast<int>(c.knob_int("points"));
  bo.dedup_tolerance = c.knob_double("dedup_tolerance");
  bo.cluster_tolerance = c.knob_double("cluster_tolerance");
  const auto sols = spectrum_in_box(box, ns, c.profile, c.geometry, bo);
  Sink sink(c.output, out);
  CsvWriter csv(sink.stream(), {"n", "re_z", "im_z", "multiplicity", "residual", "rayleigh_re",
                                "boundary_mismatch", "newton_iterations"});
  for (const auto& s : sols)
    csv.row() << s.n << s.z.real() << s.z.imag() << s.multiplicity << s.residual
              << rayleigh_real_part(s, c.profile) << s.boundary_mismatch << s.newton_iterations;
  return 0;
}

int cmd_resolvent_scan(const RunConfig& c, std::ostream& out, std::ostream& diag) {
  require_torus(c);
  std::vector<double> s = c.knob_list("s");
  if (s.empty()) s = offset_grid(c.knob_double("s_lo"), c.knob_double("s_hi"), static_cast<int>(c.knob_int("count")));
  ResolventOptions ro;
  ro.n_max = static_cast<int>(c.knob_int("n_max"));
  ro.grid_n = static_cast<int>(c.knob_int("grid_n"));
  ro.richardson = c.knob_bool("richardson");
  const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
  const double wlo = is_auto(c, "window_lo") ? *lo_it : c.knob_double("window_lo");
  const double whi = is_auto(c, "window_hi") ? *hi_it : c.knob_double("window_hi");
  const bool fit = c.knob_bool("fit");

  ResolventScan scan;
  if (fit) {
    scan = scan_and_fit(c.profile, s, {wlo, whi}, ro);
  } else {
    scan.s_grid = s;
    scan.norms.resize(s.size());
    scan.argmax_n.resize(s.size());
    parallel_for(s.size(), [&](std::size_t i) {
      const auto v = resolvent_value(s[i], c.profile, ro);
      scan.norms[i] = v.norm;
      scan.argmax_n[i] = v.argmax_n;
    });
  }
  const bool oracle = c.profile.is_zero();
  std::vector<std::string> header = {"s", "norm", "argmax_n", "grid_N"};
  if (oracle) header.push_back("oracle_norm");
  {
    Sink sink(c.output, out);
    CsvWriter csv(sink.stream(), header);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto row = csv.row();
      row << s[i] << scan.norms[i] << scan.argmax_n[i] << ro.grid_n;
      if (oracle) row << free_resolvent_norm(s[i], ro.n_max > 0 ? ro.n_max : default_mode_cutoff(s[i]));
    }
  }
  if (fit) {
    ordered_json j = {{"profile", c.profile.kind_name()},
                      {"points", s.size()},
                      {"grid_n", ro.grid_n},
                      {"richardson", ro.richardson},
                      {"window", {wlo, whi}},
                      {"fitted_exponent", scan.fitted_exponent},
                      {"fit", fit_json(scan.fit)},
                      // finite-s exponents for smooth profiles are not asymptotic rates
                      {"indicative", std::holds_alternative<SmoothExpDamping>(c.profile.kind())}};
    write_json(j, c.knob("summary"), diag);
  }
  return 0;
}

int cmd_quasimode(const RunConfig& c, std::ostream& out) {
  require_torus(c);
  const auto ns = c.knob_int_list("n");
  if (ns.empty()) usage("--n needs at least one value");
  const double margin = c.knob_double("margin");
  const int samples = static_cast<int>(c.knob_int("samples"));
  const std::string shape = c.knob("cutoff");
  auto support = [&] {
    return is_auto(c, "support") ? c.profile.undamped_half_width() - margin : c.knob_double("support");
  };
  Cutoff cut;
  if (shape == "auto") cut = build_cutoff(c.profile, margin, samples);
  else if (shape == "bump") cut = bump_cutoff(support(), samples);
  else if (shape == "cosine") cut = cosine_cutoff(support(), samples);
  else if (shape == "constant") cut = constant_cutoff(samples);
  else usage("--cutoff: expected auto, bump, cosine or constant");
  const auto rows = quasimode_table(ns, cut, c.profile);
  Sink sink(c.output, out);
  CsvWriter csv(sink.stream(), {"n", "frequency", "ratio", "lower_bound_C"});
  for (const auto& r : rows) csv.row() << r.n << r.frequency << r.ratio << r.lower_bound;
  return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& diag) {
  require_torus(c);
  const auto data = parse_data_terms(c.knob("data"));
  RunOptions ro;
  ro.grid_n = static_cast<int>(c.knob_int("grid_n"));
  ro.sample_interval = c.knob_double("sample_interval");
  ro.per_mode = c.knob_bool("per_mode");
  ro.conjugate_symmetry = c.knob_bool("conjugate_symmetry");
  const auto trace = run(c.profile, data, c.knob_double("t_final"), c.knob_double("dt"), ro);

  {
    Sink sink(c.output, out);
    std::vector<std::string> header = {"t", "E", "cumulative_damping"};
    for (const auto& [n, e] : trace.mode_energies) header.push_back("E_" + std::to_string(n));
    CsvWriter csv(sink.stream(), header);
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
      auto row = csv.row();
      row << trace.times[k] << trace.energies[k] << trace.damping_integrals[k];
      for (const auto& [n, e] : trace.mode_energies) row << e[k];
    }
  }
  ordered_json j = {{"profile", c.profile.kind_name()},
                    {"samples", trace.times.size()},
                    {"initial_energy", trace.initial_energy},
                    {"final_energy", trace.energies.empty() ? 0.0 : trace.energies.back()},
                    {"identity_residual", trace.identity_residual},
                    {"relative_residual", trace.initial_energy > 0.0 ? trace.identity_residual / trace.initial_energy : 0.0},
                    {"max_increase", trace.max_increase},
                    {"domain_norm", trace.domain_norm}};
  if (c.knob_bool("fit")) {
    const double w = is_auto(c, "fit_window") ? -1.0 : c.knob_double("fit_window");
    const auto fe = fit_decay(trace, DecayModel::Exponential, w);
    const auto fp = fit_decay(trace, DecayModel::Polynomial, w);
    j["fits"] = {{"exponential", {{"rate", fe.value}, {"r2", fe.r2}}},
                 {"polynomial", {{"exponent", fp.value}, {"r2", fp.r2}}},
                 {"preferred", fe.r2 >= fp.r2 ? "exponential" : "polynomial"}};
  }
  write_json(j, c.knob("summary"), diag);
  return 0;
}

struct ReportLine {
  std::string status, check, value, bound, note;
};

int cmd_semigroup_verify(const RunConfig& c, std::ostream& out) {
  require_torus(c);
  const int cutoff = static_cast<int>(c.knob_int("cutoff"));
  const auto sys = build_system(c.profile, cutoff);
  std::vector<ReportLine> lines;
  auto pass = [](bool ok) { return std::string(ok ? "PASS" : "FAIL"); };

  const auto loc = check_spectrum_localization(sys);
  lines.push_back({pass(loc.worst_excess <= 1e-9), "localization", format_double(loc.worst_excess), "1e-09",
                   "eigenvalues=" + std::to_string(loc.eigenvalue_count) +
                       " b_norm_sq=" + format_double(loc.b_norm_sq) +
                       " continuum_b_norm_sq=" + format_double(loc.continuum_b_norm_sq) +
                       (loc.truncated_bound_binding ? " truncated bound binding" : "")});
  lines.push_back({pass(loc.kernel_ok), "kernel", std::to_string(loc.kernel_dim),
                   std::to_string(loc.laplacian_kernel), "dim ker of generator vs dim ker A"});
  if (c.profile.is_even())
    lines.push_back({pass(loc.conjugation_defect <= 1e-9), "conjugation", format_double(loc.conjugation_defect),
                     "1e-09", ""});

  const int z_count = static_cast<int>(c.knob_int("z_count"));
  std::mt19937_64 rng(static_cast<unsigned long long>(c.knob_int("seed")));
  std::uniform_real_distribution<double> re(-0.4, -0.01), im(1.0, 50.0);
  double identity = 0.0;
  for (int i = 0; i < z_count; ++i) {
    const Complex z{re(rng), im(rng)};
    identity = std::max(identity, check_resolvent_identity(sys, z));
  }
  const double tol = c.knob_double("identity_tol");
  lines.push_back({pass(identity <= tol), "resolvent_identity", format_double(identity), format_double(tol),
                   std::to_string(z_count) + " random z"});

  const auto s_list = c.knob_list("s");
  if (!s_list.empty()) {
    const auto sw = check_sandwich(sys, s_list);
    const double bound = c.knob_double("sandwich_bound");
    lines.push_back({pass(std::isfinite(sw.constant) && sw.constant <= bound), "sandwich",
                     format_double(sw.constant), format_double(bound),
                     std::to_string(s_list.size()) + " frequencies"});
  }

  const double alpha = c.knob_double("gap_alpha");
  const auto gap = check_gap_region(sys, alpha, c.knob_double("gap_eps"));
  const int max_n = is_auto(c, "gap_max_n") ? cutoff / 2 : static_cast<int>(c.knob_int("gap_max_n"));
  double worst = 0.0;
  for (const auto& r : gap.rows)
    if (r.n <= max_n) worst = std::max(worst, r.product);
  if (const auto* strip = std::get_if<StripDamping>(&c.profile.kind())) {
    const double q = kPi / 2.0;
    const double bound = 1.1 * q * q / (std::pow(strip->half_width, 3) * std::sqrt(2.0 * strip->strength));
    lines.push_back({pass(worst <= bound), "gap_region", format_double(worst), format_double(bound),
                     "max |Re z| (Im z)^(1/alpha - eps) over blocks 1.." + std::to_string(max_n)});
  } else {
    lines.push_back({"INFO", "gap_region", format_double(worst), "", "blocks 1.." + std::to_string(max_n)});
  }

  bool ok = true;
  {
    Sink sink(c.output, out);
    for (const auto& l : lines) {
      ok = ok && l.status != "FAIL";
      sink.stream() << l.status << " " << l.check << " value=" << l.value;
      if (!l.bound.empty()) sink.stream() << " bound=" << l.bound;
      if (!l.note.empty()) sink.stream() << " " << l.note;
      sink.stream() << "\n";
    }
  }
  if (const std::string& path = c.knob("csv"); !path.empty()) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) usage("cannot open " + path + " for writing");
    CsvWriter csv(f, {"status", "check", "value", "bound", "note"});
    for (const auto& l : lines) csv.row() << l.status << l.check << l.value << l.bound << l.note;
  }
  return ok ? 0 : 1;
}

int cmd_verify_all(const RunConfig& c, std::ostream& out) {
  const auto* strip = std::get_if<StripDamping>(&c.profile.kind());
  if (!strip) usage("verify-all needs --profile strip");
  AcceptanceOptions ao;
  ao.strength = strip->strength;
  ao.half_width = strip->half_width;
  ao.only = c.knob_int_list("only");
  Sink sink(c.output, out);
  int passed = 0, total = 0;
  run_acceptance(ao, [&](const CriterionResult& r) {
    sink.stream() << format_result(r) << "\n" << std::flush;
    passed += r.pass;
    ++total;
  });
  sink.stream() << passed << "/" << total << " criteria passed\n";
  return passed == total ? 0 : 1;
}

}  // namespace

std::vector<DataTerm> parse_data_terms(std::string_view text) {
  std::vector<DataTerm> out;
  text = trim(text);
  while (!text.empty()) {
    auto semi = text.find(';');
    std::string_view item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    std::vector<std::string_view> f;
    for (std::size_t p = 0;;) {
      auto colon = item.find(':', p);
      f.push_back(trim(item.substr(p, colon - p)));
      if (colon == std::string_view::npos) break;
      p = colon + 1;
    }
    DataTerm t;
    try {
      if (f[0] == "fourier" && f.size() == 4) {
        t.shape = DataShape::Fourier;
        t.n = static_cast<int>(parse_integer(f[1]));
        t.m = static_cast<int>(parse_integer(f[2]));
        t.amplitude = parse_double(f[3]);
      } else if (f[0] == "bump" && (f.size() == 3 || f.size() == 4)) {
        t.shape = DataShape::Bump;
        t.n = static_cast<int>(parse_integer(f[1]));
        t.amplitude = parse_double(f[2]);
        if (f.size() == 4) t.support = parse_double(f[3]);
      } else {
        usage("bad data term '" + std::string(item) + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UsageError) throw;
      usage("bad data term '" + std::string(item) + "': " + e.what());
    }
    out.push_back(t);
  }
  if (out.empty()) usage("--data needs at least one term");
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  switch (config.command) {
    case Command::Branch: return cmd_branch(config, out);
    case Command::SpectrumBox: return cmd_spectrum_box(config, out);
    case Command::ResolventScan: return cmd_resolvent_scan(config, out, diag);
    case Command::Quasimode: return cmd_quasimode(config, out);
    case Command::Simulate: return cmd_simulate(config, out, diag);
    case Command::SemigroupVerify: return cmd_semigroup_verify(config, out);
    case Command::VerifyAll: return cmd_verify_all(config, out);
  }
  return 2;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto is_usage = [](const Error& e) {
    return e.code() == ErrorCode::UsageError || e.code() == ErrorCode::ParseError;
  };
  Invocation inv;
  try {
    inv = parse_args_and_config(argc, argv);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
  if (inv.help) {
    out << inv.text;
    return 0;
  }
  if (inv.print_config) {
    out << serialize(inv.config);
    return 0;
  }
  try {
    return run(inv.config, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return is_usage(e) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dwsl::cli
