#pragma once

#include <cstddef>
#include <functional>

namespace ivbench {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
// executed exactly once; callers write results into pre-sized slots so the
// output does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace ivbench
