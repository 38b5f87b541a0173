#pragma once

#include <cstddef>
#include <functional>

namespace proxykit {

/// Caps the worker count used by parallel_for (0 = hardware concurrency).
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(i) for i in [0, n) over contiguous chunks. Results must not
/// depend on scheduling; every index is processed exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace proxykit
