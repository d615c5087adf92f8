#pragma once

#include <cstddef>
#include <functional>

namespace fracspec {

// Worker count for grid maps; 0 picks the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n); each index is visited exactly once. The first
// exception thrown by any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fracspec
