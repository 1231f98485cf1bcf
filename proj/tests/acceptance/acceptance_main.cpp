// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "dwsl_cli/acceptance.hpp"

// Usage: dwsl_acceptance [criterion ...]
int main(int argc, char** argv) {
  dwsl::cli::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int passed = 0, total = 0;
  dwsl::cli::run_acceptance(options, [&](const dwsl::cli::CriterionResult& r) {
    ++total;
    if (r.pass) ++passed;
    std::cout << dwsl::cli::format_result(r) << std::endl;
  });
  std::printf("%d/%d criteria passed\n", passed, total);
  return passed == total ? 0 : 1;
}
