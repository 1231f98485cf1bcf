// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace dwsl {

// Hardware concurrency capped by DWSL_THREADS (if set and positive).
int thread_count();

// Runs body(i) for i in [0, count). Each index runs exactly once; callers
// write into pre-sized slots so results never depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dwsl
