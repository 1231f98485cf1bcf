// SPDX-License-Identifier: Apache-2.0
#include "dwsl_cli/run_config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"

namespace dwsl::cli {
namespace {

const std::vector<std::pair<Command, std::string_view>> kNames = {
    {Command::Branch, "branch"},
    {Command::SpectrumBox, "spectrum-box"},
    {Command::ResolventScan, "resolvent-scan"},
    {Command::Quasimode, "quasimode"},
    {Command::Simulate, "simulate"},
    {Command::SemigroupVerify, "semigroup-verify"},
    {Command::VerifyAll, "verify-all"},
};

const std::map<Command, std::vector<KnobSpec>>& knob_table() {
  static const std::map<Command, std::vector<KnobSpec>> table = {
      {Command::Branch,
       {
           {"parity", "even", "even or odd"},
           {"m", "0", "horizontal quantum number"},
           {"h", "0.04,0.02,0.01,0.005", "semiclassical parameters"},
           {"n", "auto", "vertical index; auto is round(1/(2 pi h))"},
       }},
      {Command::SpectrumBox,
       {
           {"re_lo", "-0.6", "box real part, lower"},
           {"re_hi", "0.05", "box real part, upper"},
           {"im_lo", "1", "box imaginary part, lower"},
           {"im_hi", "10", "box imaginary part, upper"},
           {"n", "0,1", "vertical indices"},
           {"points", "4096", "initial contour points per box"},
           {"dedup_tolerance", "1e-8", "merge distance for roots"},
           {"cluster_tolerance", "1e-6", "box half-size for multiple roots"},
       }},
      {Command::ResolventScan,
       {
           {"s_lo", "1", "scan start"},
           {"s_hi", "60", "scan end"},
           {"count", "32", "points on the offset grid"},
           {"s", "", "explicit s list; overrides s_lo, s_hi, count"},
           {"n_max", "0", "vertical cutoff; 0 is ceil(s/(2 pi)) + 8"},
           {"grid_n", "2048", "finite-difference points"},
           {"richardson", "false", "extrapolate sigma_min from grid_n and 2 grid_n"},
           {"fit", "true", "fit log norm against log s"},
           {"window_lo", "auto", "fit window start; auto is the first s"},
           {"window_hi", "auto", "fit window end; auto is the last s"},
           {"summary", "-", "fit summary path; - is stderr"},
       }},
      {Command::Quasimode,
       {
           {"n", "1..100", "vertical indices"},
           {"margin", "0.05", "distance kept from the damped region"},
           {"samples", "8193", "quadrature samples"},
           {"cutoff", "auto", "auto, bump, cosine or constant"},
           {"support", "auto", "cutoff support; auto is half-width minus margin"},
       }},
      {Command::Simulate,
       {
           {"t_final", "10", "final time"},
           {"dt", "0.001", "time step"},
           {"grid_n", "256", "finite-difference points"},
           {"sample_interval", "0.1", "trace sampling interval"},
           {"data", "fourier:1:0:1", "terms fourier:n:m:amp or bump:n:amp[:support], ';' separated"},
           {"per_mode", "false", "add one energy column per vertical mode"},
           {"conjugate_symmetry", "true", "evolve n >= 0 only"},
           {"fit", "false", "fit exponential and polynomial decay models"},
           {"fit_window", "auto", "fit window start; auto is the late half"},
           {"summary", "-", "run summary path; - is stderr"},
       }},
      {Command::SemigroupVerify,
       {
           {"cutoff", "16", "frequency cutoff"},
           {"s", "5..100:5", "sandwich frequencies"},
           {"z_count", "20", "random points for the resolvent identity"},
           {"seed", "1", "seed for the random points"},
           {"identity_tol", "1e-10", "resolvent identity tolerance"},
           {"sandwich_bound", "10", "largest accepted sandwich constant"},
           {"gap_alpha", "0.66666666666666663", "gap exponent"},
           {"gap_eps", "0", "gap exponent slack"},
           {"gap_max_n", "auto", "largest block index in the gap check; auto is cutoff/2"},
           {"csv", "", "optional CSV twin of the report"},
       }},
      {Command::VerifyAll,
       {
           {"only", "", "criterion numbers to run; empty runs all"},
       }},
  };
  return table;
}

// Flag name -> profile key.
const std::vector<std::pair<std::string, std::string>> kProfileFlags = {
    {"Btilde", "strength"}, {"sigma", "half_width"}, {"alpha", "alpha"},
    {"amplitude", "amplitude"}, {"value", "value"}, {"values", "values"},
};

const std::map<std::string, std::map<std::string, std::string>> kProfileDefaults = {
    {"strip", {{"strength", "1"}, {"half_width", "0.25"}}},
    {"smooth_exp", {{"alpha", "1"}, {"half_width", "0.25"}, {"amplitude", "1"}}},
    {"constant", {{"value", "1"}}},
    {"zero", {}},
    {"sampled", {}},
};

[[noreturn]] void usage(const std::string& what) { raise(ErrorCode::UsageError, what); }

std::string flag_of(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

bool is_bool_knob(const KnobSpec& k) {
  return k.default_value == "true" || k.default_value == "false";
}

const std::set<std::string>& profile_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"strip", {"strength", "half_width"}},
      {"smooth_exp", {"alpha", "half_width", "amplitude"}},
      {"constant", {"value"}},
      {"zero", {}},
      {"sampled", {"values"}},
  };
  auto it = keys.find(kind);
  if (it == keys.end()) usage("unknown profile kind '" + kind + "'");
  return it->second;
}

DampingProfile build_profile(std::map<std::string, std::string> sec) {
  const std::string kind = sec.at("kind");
  const auto& allowed = profile_keys(kind);
  for (const auto& [k, v] : sec)
    if (k != "kind" && !allowed.count(k))
      usage("profile key '" + k + "' does not apply to kind " + kind);
  for (const auto& [k, v] : kProfileDefaults.at(kind)) sec.emplace(k, v);
  if (kind == "sampled" && !sec.count("values")) usage("profile kind sampled needs values");
  if (kind == "zero") sec = {{"kind", "constant"}, {"value", "0"}};
  try {
    return profile_from_section(sec);
  } catch (const Error& e) {
    usage("bad profile: " + std::string(e.what()));
  }
}

Geometry build_geometry(const std::string& domain, const std::string& boundary) {
  Geometry g;
  if (domain == "torus") g.domain = Domain::Torus;
  else if (domain == "square") g.domain = Domain::Square;
  else usage("unknown domain '" + domain + "'");
  if (boundary.empty()) {
    g.boundary = g.domain == Domain::Torus ? Boundary::Periodic : Boundary::Dirichlet;
  } else if (boundary == "periodic") {
    g.boundary = Boundary::Periodic;
  } else if (boundary == "dirichlet") {
    g.boundary = Boundary::Dirichlet;
  } else if (boundary == "neumann") {
    g.boundary = Boundary::Neumann;
  } else {
    usage("unknown boundary '" + boundary + "'");
  }
  if (!g.valid())
    usage("domain " + domain + " does not allow boundary " + std::string(to_string(g.boundary)));
  return g;
}

const KnobSpec* find_knob(Command c, const std::string& key) {
  for (const auto& k : knob_specs(c))
    if (k.key == key) return &k;
  return nullptr;
}

void apply_sections(const KeyValueConfig& cfg, Command command, RunConfig& out,
                    std::map<std::string, std::string>& profile_sec, std::string& domain,
                    std::string& boundary) {
  for (const auto& [name, sec] : cfg.sections()) {
    if (name == "run") {
      for (const auto& [k, v] : sec) {
        if (k == "command") {
          auto c = command_from_name(v);
          if (!c) usage("unknown command '" + v + "' in config");
          if (*c != command) usage("config is for command " + v);
        } else if (k == "output") {
          out.output = v;
        } else {
          usage("unknown key '" + k + "' in [run]");
        }
      }
    } else if (name == "profile") {
      profile_sec = sec;
      if (!profile_sec.count("kind")) usage("[profile] needs kind");
    } else if (name == "geometry") {
      for (const auto& [k, v] : sec) {
        if (k == "domain") domain = v;
        else if (k == "boundary") boundary = v;
        else usage("unknown key '" + k + "' in [geometry]");
      }
    } else {
      auto c = command_from_name(name);
      if (!c) usage("unknown section [" + name + "]");
      for (const auto& [k, v] : sec) {
        if (!find_knob(*c, k)) usage("unknown key '" + k + "' in [" + name + "]");
        if (*c == command) out.knobs[k] = v;
      }
    }
  }
}

struct SubcommandFlags {
  Command command;
  CLI::App* app = nullptr;
  std::string config, output, profile, domain, boundary;
  bool print_config = false;
  std::map<std::string, std::string> profile_values;
  std::map<std::string, CLI::Option*> profile_opts;
  std::map<std::string, std::string> knob_values;
  std::map<std::string, CLI::Option*> knob_opts;
  CLI::Option *config_opt = nullptr, *output_opt = nullptr, *profile_opt = nullptr,
              *domain_opt = nullptr, *boundary_opt = nullptr;
};

void add_flags(SubcommandFlags& f) {
  CLI::App* a = f.app;
  f.config_opt = a->add_option("--config", f.config, "key=value config file");
  f.output_opt = a->add_option("--output,-o", f.output, "output path; - is stdout");
  f.profile_opt = a->add_option("--profile", f.profile, "strip, smooth_exp, constant, zero or sampled");
  for (const auto& [flag, key] : kProfileFlags)
    f.profile_opts[flag] = a->add_option("--" + flag, f.profile_values[flag], "profile " + key);
  f.domain_opt = a->add_option("--domain", f.domain, "torus or square");
  f.boundary_opt = a->add_option("--boundary", f.boundary, "periodic, dirichlet or neumann");
  a->add_flag("--print-config", f.print_config, "print the resolved config and exit");
  for (const auto& k : knob_specs(f.command)) {
    auto* opt = a->add_option(flag_of(k.key), f.knob_values[k.key],
                              k.help + " (default " + (k.default_value.empty() ? "none" : k.default_value) + ")");
    if (is_bool_knob(k)) opt->expected(0, 1)->default_str("true");
    f.knob_opts[k.key] = opt;
  }
}

RunConfig resolve(const SubcommandFlags& f) {
  RunConfig out = default_config(f.command);
  std::map<std::string, std::string> profile_sec = {{"kind", "strip"}};
  std::string domain = "torus", boundary;
  if (f.config_opt->count()) {
    KeyValueConfig cfg;
    try {
      cfg = KeyValueConfig::load(f.config);
    } catch (const Error& e) {
      usage(e.what());
    }
    apply_sections(cfg, f.command, out, profile_sec, domain, boundary);
  }
  if (f.output_opt->count()) out.output = f.output;
  if (f.profile_opt->count() && f.profile != profile_sec.at("kind")) profile_sec = {{"kind", f.profile}};
  for (const auto& [flag, key] : kProfileFlags) {
    if (!f.profile_opts.at(flag)->count()) continue;
    const auto& kind = profile_sec.at("kind");
    if (!profile_keys(kind).count(key)) usage("--" + flag + " does not apply to profile " + kind);
    profile_sec[key] = f.profile_values.at(flag);
  }
  out.profile = build_profile(profile_sec);
  if (f.domain_opt->count()) {
    if (f.domain != domain) boundary.clear();
    domain = f.domain;
  }
  if (f.boundary_opt->count()) boundary = f.boundary;
  out.geometry = build_geometry(domain, boundary);
  for (const auto& [key, opt] : f.knob_opts)
    if (opt->count()) out.knobs[key] = f.knob_values.at(key);
  for (const auto& k : knob_specs(f.command))
    if (is_bool_knob(k)) (void)out.knob_bool(k.key);
  return out;
}

double parse_number(std::string_view s) {
  try {
    return parse_double(s);
  } catch (const Error&) {
    usage("bad number '" + std::string(s) + "'");
  }
}

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kNames)
    if (cmd == c) return name;
  return "?";
}

std::optional<Command> command_from_name(std::string_view name) {
  for (const auto& [cmd, n] : kNames)
    if (n == name) return cmd;
  return std::nullopt;
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> cmds = [] {
    std::vector<Command> v;
    for (const auto& [c, n] : kNames) v.push_back(c);
    return v;
  }();
  return cmds;
}

const std::vector<KnobSpec>& knob_specs(Command c) { return knob_table().at(c); }

const std::string& RunConfig::knob(const std::string& key) const {
  auto it = knobs.find(key);
  if (it == knobs.end()) raise(ErrorCode::InvalidArgument, "no knob " + key);
  return it->second;
}

double RunConfig::knob_double(const std::string& key) const {
  try {
    return parse_double(knob(key));
  } catch (const Error&) {
    usage(flag_of(key) + ": expected a number, got '" + knob(key) + "'");
  }
}

long long RunConfig::knob_int(const std::string& key) const {
  try {
    return parse_integer(knob(key));
  } catch (const Error&) {
    usage(flag_of(key) + ": expected an integer, got '" + knob(key) + "'");
  }
}

bool RunConfig::knob_bool(const std::string& key) const {
  const auto& v = knob(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  usage(flag_of(key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> RunConfig::knob_list(const std::string& key) const {
  return parse_range_list(knob(key));
}

std::vector<int> RunConfig::knob_int_list(const std::string& key) const {
  std::vector<int> out;
  for (double v : knob_list(key)) {
    if (v != std::round(v)) usage(flag_of(key) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return command == o.command && profile == o.profile && geometry.domain == o.geometry.domain &&
         geometry.boundary == o.geometry.boundary && output == o.output && knobs == o.knobs;
}

RunConfig default_config(Command c) {
  RunConfig cfg;
  cfg.command = c;
  for (const auto& k : knob_specs(c)) cfg.knobs[k.key] = k.default_value;
  return cfg;
}

std::string serialize(const RunConfig& config) {
  std::string out = "[run]\ncommand=" + std::string(command_name(config.command)) +
                    "\noutput=" + config.output + "\n\n[profile]\n" + to_config(config.profile) +
                    "\n[geometry]\ndomain=" + to_string(config.geometry.domain) +
                    "\nboundary=" + to_string(config.geometry.boundary) + "\n\n[" +
                    std::string(command_name(config.command)) + "]\n";
  for (const auto& k : knob_specs(config.command)) out += k.key + "=" + config.knob(k.key) + "\n";
  return out;
}

RunConfig parse_config_text(std::string_view text) {
  KeyValueConfig cfg;
  try {
    cfg = KeyValueConfig::parse(text);
  } catch (const Error& e) {
    usage(e.what());
  }
  const std::string* name = cfg.find("run", "command");
  if (!name) usage("config has no [run] command");
  auto c = command_from_name(*name);
  if (!c) usage("unknown command '" + *name + "'");
  RunConfig out = default_config(*c);
  std::map<std::string, std::string> profile_sec = {{"kind", "strip"}};
  std::string domain = "torus", boundary;
  apply_sections(cfg, *c, out, profile_sec, domain, boundary);
  out.profile = build_profile(profile_sec);
  out.geometry = build_geometry(domain, boundary);
  return out;
}

std::vector<double> parse_range_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    auto comma = text.find(',');
    std::string_view item = trim(text.substr(0, comma));
    if (item.empty()) usage("empty item in list");
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      std::string_view rest = item.substr(dots + 2);
      double step = 1.0;
      if (auto colon = rest.find(':'); colon != std::string_view::npos) {
        step = parse_number(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
      }
      const double lo = parse_number(item.substr(0, dots)), hi = parse_number(rest);
      if (!(step > 0.0) || hi < lo) usage("bad range '" + std::string(item) + "'");
      const long long count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
      if (count > 10000000) usage("range '" + std::string(item) + "' is too long");
      for (long long i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
      out.push_back(parse_number(item));
    }
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

Invocation parse_args_and_config(int argc, const char* const* argv) {
  CLI::App app{"dwsl: spectra, resolvents and energy decay of the damped wave equation"};
  app.require_subcommand(0, 1);
  app.set_help_flag("--help", "print help and exit");
  std::vector<std::unique_ptr<SubcommandFlags>> subs;
  for (Command c : all_commands()) {
    auto f = std::make_unique<SubcommandFlags>();
    f->command = c;
    f->app = app.add_subcommand(std::string(command_name(c)));
    // -h stays free for --h.
    f->app->set_help_flag("--help", "print help and exit");
    add_flags(*f);
    subs.push_back(std::move(f));
  }

  Invocation inv;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    inv.text = app.help();
    for (const auto& f : subs)
      if (f->app->parsed()) inv.text = f->app->help();
    return inv;
  } catch (const CLI::ParseError& e) {
    usage(std::string(e.what()) + "\n" + app.help());
  }
  for (const auto& f : subs) {
    if (!f->app->parsed()) continue;
    inv.config = resolve(*f);
    inv.print_config = f->print_config;
    return inv;
  }
  usage("missing command\n" + app.help());
}

}  // namespace dwsl::cli
