// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dwsl/damping.hpp"
#include "dwsl/types.hpp"

namespace dwsl::cli {

enum class Command {
  Branch,
  SpectrumBox,
  ResolventScan,
  Quasimode,
  Simulate,
  SemigroupVerify,
  VerifyAll,
};

std::string_view command_name(Command c);
std::optional<Command> command_from_name(std::string_view name);
const std::vector<Command>& all_commands();

struct KnobSpec {
  std::string key;  // config key; the flag is --key with '_' -> '-'
  std::string default_value;
  std::string help;
};

const std::vector<KnobSpec>& knob_specs(Command c);

struct RunConfig {
  Command command = Command::VerifyAll;
  DampingProfile profile = DampingProfile::strip(1.0, 0.25);
  Geometry geometry;
  std::string output = "-";  // "-" is stdout
  std::map<std::string, std::string> knobs;

  const std::string& knob(const std::string& key) const;
  double knob_double(const std::string& key) const;
  long long knob_int(const std::string& key) const;
  bool knob_bool(const std::string& key) const;
  // Comma list whose items may be ranges a..b or a..b:step.
  std::vector<double> knob_list(const std::string& key) const;
  std::vector<int> knob_int_list(const std::string& key) const;

  bool operator==(const RunConfig& other) const;
};

RunConfig default_config(Command c);

// [run], [profile], [geometry] and one section named after the command.
std::string serialize(const RunConfig& config);
RunConfig parse_config_text(std::string_view text);

std::vector<double> parse_range_list(std::string_view text);

struct Invocation {
  RunConfig config;
  bool help = false;         // text holds the help screen
  bool print_config = false;
  std::string text;
};

// Flags override the config file, which overrides the defaults. Raises
// UsageError for a missing command, unknown flags or keys and conflicting
// geometry.
Invocation parse_args_and_config(int argc, const char* const* argv);

}  // namespace dwsl::cli
