// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "dwsl_cli/commands.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return dwsl::cli::main_entry(argc, argv, std::cout, std::cerr);
}
