// SPDX-License-Identifier: Apache-2.0
#include "dwsl/damping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dwsl/config.hpp"
#include "dwsl/error.hpp"
#include "dwsl/types.hpp"

namespace dwsl {

const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::Dirichlet: return "dirichlet";
    case Boundary::Neumann: return "neumann";
  }
  return "?";
}

const char* to_string(Domain d) { return d == Domain::Torus ? "torus" : "square"; }

namespace {

double wrap(double x) { return x - std::floor(x + 0.5); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double smooth_exp_value(const SmoothExpDamping& p, double x) {
  double t = (std::abs(x) - p.half_width) / (0.5 - p.half_width);
  if (t <= 0.0) return 0.0;
  return p.amplitude * std::exp(-std::pow(t, -p.alpha));
}

double smooth_exp_derivative(const SmoothExpDamping& p, double x) {
  double sp = 0.5 - p.half_width;
  double t = (std::abs(x) - p.half_width) / sp;
  if (t <= 0.0) return 0.0;
  double ta = std::pow(t, -p.alpha);
  double d = p.amplitude * std::exp(-ta) * p.alpha * ta / t / sp;
  return x < 0.0 ? -d : d;
}

double sampled_value(const SampledDamping& p, double x) {
  const auto n = static_cast<int>(p.values.size());
  double u = (wrap(x) + 0.5) * n;
  int j = static_cast<int>(std::floor(u));
  double f = u - j;
  j = ((j % n) + n) % n;
  return (1.0 - f) * p.values[j] + f * p.values[(j + 1) % n];
}

double sampled_derivative(const SampledDamping& p, double x) {
  const auto n = static_cast<int>(p.values.size());
  auto node_d = [&](int j) {
    return (p.values[(j + 1) % n] - p.values[(j - 1 + n) % n]) * 0.5 * n;
  };
  double u = (wrap(x) + 0.5) * n;
  int j = static_cast<int>(std::floor(u));
  double f = u - j;
  j = ((j % n) + n) % n;
  return (1.0 - f) * node_d(j) + f * node_d((j + 1) % n);
}

void validate(const DampingProfile::Kind& kind) {
  std::visit(overloaded{
                 [](const StripDamping& p) {
                   if (!(p.strength > 0.0) || !std::isfinite(p.strength))
                     raise(ErrorCode::InvalidArgument, "strip strength must be > 0");
                   if (!(p.half_width > 0.0 && p.half_width < 0.5))
                     raise(ErrorCode::InvalidArgument, "strip half_width must lie in (0, 1/2)");
                 },
                 [](const SmoothExpDamping& p) {
                   if (!(p.alpha > 0.0)) raise(ErrorCode::InvalidArgument, "alpha must be > 0");
                   if (!(p.half_width >= 0.0 && p.half_width < 0.5))
                     raise(ErrorCode::InvalidArgument, "half_width must lie in [0, 1/2)");
                   if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude))
                     raise(ErrorCode::InvalidArgument, "amplitude must be >= 0");
                 },
                 [](const ConstantDamping& p) {
                   if (!(p.value >= 0.0) || !std::isfinite(p.value))
                     raise(ErrorCode::InvalidArgument, "constant damping must be >= 0");
                 },
                 [](const SampledDamping& p) {
                   if (p.values.size() < 2)
                     raise(ErrorCode::InvalidArgument, "sampled profile needs >= 2 values");
                   for (double v : p.values)
                     if (!(v >= 0.0) || !std::isfinite(v))
                       raise(ErrorCode::InvalidArgument, "sampled values must be finite and >= 0");
                 },
             },
             kind);
}

}  // namespace

DampingProfile::DampingProfile(Kind kind) : kind_(std::move(kind)) { validate(kind_); }

DampingProfile DampingProfile::strip(double strength, double half_width) {
  return DampingProfile(StripDamping{strength, half_width});
}
DampingProfile DampingProfile::smooth_exp(double alpha, double half_width, double amplitude) {
  return DampingProfile(SmoothExpDamping{alpha, half_width, amplitude});
}
DampingProfile DampingProfile::constant(double value) {
  return DampingProfile(ConstantDamping{value});
}
DampingProfile DampingProfile::sampled(std::vector<double> values) {
  return DampingProfile(SampledDamping{std::move(values)});
}

std::string_view DampingProfile::kind_name() const {
  return std::visit(overloaded{
                        [](const StripDamping&) { return std::string_view("strip"); },
                        [](const SmoothExpDamping&) { return std::string_view("smooth_exp"); },
                        [](const ConstantDamping&) { return std::string_view("constant"); },
                        [](const SampledDamping&) { return std::string_view("sampled"); },
                    },
                    kind_);
}

double DampingProfile::operator()(double x) const {
  x = wrap(x);
  return std::visit(overloaded{
                        [x](const StripDamping& p) {
                          return std::abs(x) <= p.half_width ? 0.0 : p.strength;
                        },
                        [x](const SmoothExpDamping& p) { return smooth_exp_value(p, x); },
                        [](const ConstantDamping& p) { return p.value; },
                        [x](const SampledDamping& p) { return sampled_value(p, x); },
                    },
                    kind_);
}

double DampingProfile::limit(double x, int side) const {
  if (const auto* s = std::get_if<StripDamping>(&kind_)) {
    double a = std::abs(wrap(x));
    if (a != s->half_width) return (*this)(x);
    bool outward = (wrap(x) > 0.0) == (side > 0);
    return outward ? s->strength : 0.0;
  }
  return (*this)(x);
}

double DampingProfile::derivative(double x) const {
  x = wrap(x);
  return std::visit(overloaded{
                        [](const StripDamping&) { return 0.0; },
                        [x](const SmoothExpDamping& p) { return smooth_exp_derivative(p, x); },
                        [](const ConstantDamping&) { return 0.0; },
                        [x](const SampledDamping& p) { return sampled_derivative(p, x); },
                    },
                    kind_);
}

double DampingProfile::max_value() const {
  return std::visit(overloaded{
                        [](const StripDamping& p) { return p.strength; },
                        [](const SmoothExpDamping& p) {
                          return p.amplitude * std::exp(-1.0);
                        },
                        [](const ConstantDamping& p) { return p.value; },
                        [](const SampledDamping& p) {
                          return *std::max_element(p.values.begin(), p.values.end());
                        },
                    },
                    kind_);
}

double DampingProfile::min_value() const {
  return std::visit(overloaded{
                        [](const StripDamping&) { return 0.0; },
                        [](const SmoothExpDamping&) { return 0.0; },
                        [](const ConstantDamping& p) { return p.value; },
                        [](const SampledDamping& p) {
                          return *std::min_element(p.values.begin(), p.values.end());
                        },
                    },
                    kind_);
}

bool DampingProfile::is_even() const {
  if (const auto* s = std::get_if<SampledDamping>(&kind_)) {
    const auto n = s->values.size();
    for (std::size_t j = 1; j < n; ++j)
      if (s->values[j] != s->values[n - j]) return false;
  }
  return true;
}

std::vector<double> DampingProfile::jumps() const {
  if (const auto* s = std::get_if<StripDamping>(&kind_)) return {-s->half_width, s->half_width};
  return {};
}

double DampingProfile::undamped_half_width() const {
  return std::visit(overloaded{
                        [](const StripDamping& p) { return p.half_width; },
                        [](const SmoothExpDamping& p) {
                          return p.amplitude == 0.0 ? 0.5 : p.half_width;
                        },
                        [](const ConstantDamping& p) { return p.value == 0.0 ? 0.5 : -1.0; },
                        [](const SampledDamping& p) {
                          const auto n = static_cast<int>(p.values.size());
                          // node j sits at x = -1/2 + j/n
                          if (sampled_value(p, 0.0) != 0.0) return -1.0;
                          double u0 = 0.5 * n;
                          int r = static_cast<int>(std::ceil(u0));
                          while (r < n && p.values[r] == 0.0) ++r;
                          int l = static_cast<int>(std::floor(u0));
                          while (l >= 0 && p.values[l] == 0.0) --l;
                          if (r >= n && l < 0) return 0.5;
                          double right = (r - 1.0) / n - 0.5;
                          double left = 0.5 - (l + 1.0) / n;
                          return std::max(0.0, std::min(right, left));
                        },
                    },
                    kind_);
}

bool DampingProfile::operator==(const DampingProfile& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  return std::visit(
      overloaded{
          [&](const StripDamping& p) {
            const auto& q = std::get<StripDamping>(other.kind_);
            return p.strength == q.strength && p.half_width == q.half_width;
          },
          [&](const SmoothExpDamping& p) {
            const auto& q = std::get<SmoothExpDamping>(other.kind_);
            return p.alpha == q.alpha && p.half_width == q.half_width &&
                   p.amplitude == q.amplitude;
          },
          [&](const ConstantDamping& p) {
            return p.value == std::get<ConstantDamping>(other.kind_).value;
          },
          [&](const SampledDamping& p) {
            return p.values == std::get<SampledDamping>(other.kind_).values;
          },
      },
      kind_);
}

double eval_damping(const DampingProfile& profile, double x) { return profile(x); }

namespace {

double gradient_ratio_max(const DampingProfile& profile, double eps, int n) {
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double x = -0.5 + (j + 0.5) / n;
    double b = profile(x);
    if (!(b > 0.0)) continue;
    double r = std::abs(profile.derivative(x)) / std::pow(b, 1.0 - eps);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    best = std::max(best, r);
  }
  return best;
}

}  // namespace

GradientCondition check_gradient_condition(const DampingProfile& profile, double eps,
                                           int grid_size) {
  if (!(eps > 0.0 && eps < 1.0)) raise(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (grid_size < 8) raise(ErrorCode::InvalidArgument, "grid_size must be >= 8");
  GradientCondition out;
  if (std::holds_alternative<StripDamping>(profile.kind())) {
    out.discontinuous = true;
    out.constant_estimate = std::numeric_limits<double>::infinity();
    out.refined_estimate = out.constant_estimate;
    return out;
  }
  out.constant_estimate = gradient_ratio_max(profile, eps, grid_size);
  out.refined_estimate = gradient_ratio_max(profile, eps, 2 * grid_size);
  out.holds = std::isfinite(out.refined_estimate) &&
              out.refined_estimate <= 1.1 * out.constant_estimate + 1e-300;
  return out;
}

std::string to_config(const DampingProfile& profile) {
  std::string out = "kind=" + std::string(profile.kind_name()) + "\n";
  std::visit(overloaded{
                 [&](const StripDamping& p) {
                   out += "strength=" + format_double(p.strength) + "\n";
                   out += "half_width=" + format_double(p.half_width) + "\n";
                 },
                 [&](const SmoothExpDamping& p) {
                   out += "alpha=" + format_double(p.alpha) + "\n";
                   out += "half_width=" + format_double(p.half_width) + "\n";
                   out += "amplitude=" + format_double(p.amplitude) + "\n";
                 },
                 [&](const ConstantDamping& p) {
                   out += "value=" + format_double(p.value) + "\n";
                 },
                 [&](const SampledDamping& p) {
                   out += "values=";
                   for (std::size_t i = 0; i < p.values.size(); ++i) {
                     if (i) out += ",";
                     out += format_double(p.values[i]);
                   }
                   out += "\n";
                 },
             },
             profile.kind());
  return out;
}

DampingProfile profile_from_section(const std::map<std::string, std::string>& sec) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = sec.find(key);
    if (it == sec.end()) raise(ErrorCode::ParseError, std::string("missing profile key ") + key);
    return it->second;
  };
  auto check_keys = [&](std::set<std::string> allowed) {
    allowed.insert("kind");
    for (const auto& [k, v] : sec)
      if (!allowed.count(k)) raise(ErrorCode::ParseError, "unknown profile key " + k);
  };
  const std::string& kind = get("kind");
  if (kind == "strip") {
    check_keys({"strength", "half_width"});
    return DampingProfile::strip(parse_double(get("strength")), parse_double(get("half_width")));
  }
  if (kind == "smooth_exp") {
    check_keys({"alpha", "half_width", "amplitude"});
    return DampingProfile::smooth_exp(parse_double(get("alpha")), parse_double(get("half_width")),
                                      parse_double(get("amplitude")));
  }
  if (kind == "constant") {
    check_keys({"value"});
    return DampingProfile::constant(parse_double(get("value")));
  }
  if (kind == "sampled") {
    check_keys({"values"});
    return DampingProfile::sampled(parse_double_list(get("values")));
  }
  raise(ErrorCode::ParseError, "unknown profile kind " + kind);
}

DampingProfile profile_from_config(std::string_view text) {
  auto cfg = KeyValueConfig::parse(text);
  for (const auto& [name, sec] : cfg.sections())
    if (!name.empty() && name != "profile")
      raise(ErrorCode::ParseError, "unexpected section [" + name + "]");
  if (auto* p = cfg.find("profile", "kind")) {
    (void)p;
    return profile_from_section(cfg.sections().at("profile"));
  }
  if (!cfg.sections().count("")) raise(ErrorCode::ParseError, "empty profile config");
  return profile_from_section(cfg.sections().at(""));
}

}  // namespace dwsl
