#pragma once

#include <cstddef>
#include <functional>

namespace nanophot {

// Worker count: hardware concurrency, capped by NANOPHOT_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; results must be
// written to per-index slots so that scheduling never affects output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nanophot
