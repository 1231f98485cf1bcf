// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "dwsl/energy_sim.hpp"
#include "dwsl_cli/run_config.hpp"

namespace dwsl::cli {

// Terms "fourier:n:m:amplitude" or "bump:n:amplitude[:support]" separated by ';'.
std::vector<DataTerm> parse_data_terms(std::string_view text);

// Runs the command. Tables go to `out` when the config output is "-",
// summaries to `diag` when their path is "-". Returns 0, or 1 when a
// verification reports FAIL. Module errors propagate.
int run(const RunConfig& config, std::ostream& out, std::ostream& diag);

// Full front end: parsing, dispatch and the exit code policy (0 success,
// 1 numerical failure with the error name on `err`, 2 usage).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dwsl::cli
