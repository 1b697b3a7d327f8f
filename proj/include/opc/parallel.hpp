#pragma once

#include <functional>

namespace opc {

// Worker count: OPC_THREADS env var if set, else hardware concurrency.
int thread_count();

// Runs fn(begin, end) over contiguous chunks of [0, n). Results must not
// depend on the chunking; callers keep all accumulation per-index.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace opc
