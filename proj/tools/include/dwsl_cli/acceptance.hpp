// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace dwsl::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values, or the error name on failure
  double seconds = 0.0;
};

struct AcceptanceOptions {
  double strength = 1.0;  // strip parameters used by the strip-based checks
  double half_width = 0.25;
  std::vector<int> only;  // empty runs every criterion
};

inline constexpr int kCriterionCount = 9;

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options = {},
    const std::function<void(const CriterionResult&)>& on_result = {});

CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

// "PASS  3  cross-solver agreement  <detail>  (1.23 s)"
std::string format_result(const CriterionResult& r);

}  // namespace dwsl::cli
