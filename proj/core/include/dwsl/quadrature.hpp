// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "dwsl/error.hpp"

namespace dwsl {

// Composite Simpson on an odd number of equispaced samples.
template <class T>
T simpson(std::span<const T> f, double step) {
  const auto n = f.size();
  if (n < 3 || n % 2 == 0) raise(ErrorCode::InvalidArgument, "simpson needs an odd sample count >= 3");
  T acc = f[0] + f[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) acc += f[i] * (i % 2 ? 4.0 : 2.0);
  return acc * (step / 3.0);
}

}  // namespace dwsl
