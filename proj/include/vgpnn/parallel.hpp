#pragma once

#include <cstddef>
#include <functional>

namespace vgpnn {

// Worker count: VGPNN_THREADS if set to a positive integer, otherwise the
// hardware concurrency. Read once per process.
int worker_count();

// Overrides the worker count (tests use this to compare thread counts).
// Passing 0 restores the environment/hardware default.
void set_worker_count(int n);

// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
// possibly concurrently. Every index is visited exactly once, so bodies that
// write only to their own indices produce thread-count-independent results.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace vgpnn
