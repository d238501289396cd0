#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace sse {

// Worker count: an explicit request wins, otherwise SSE_THREADS (0 = auto),
// otherwise the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
// independent; if any throw, the exception of the lowest failing index is
// rethrown after all workers joined.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace sse
