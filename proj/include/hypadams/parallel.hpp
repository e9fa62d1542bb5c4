#pragma once

#include <cstddef>
#include <functional>

namespace hypadams {

// Worker count: hardware concurrency, capped by HYPADAMS_THREADS when set.
std::size_t thread_count();

// Overrides the environment for the rest of the process (0 restores the default).
void set_thread_cap(std::size_t cap);

// Runs body(i) for i in [0, n) on a transient pool. Results must be
// written to preallocated slots so the outcome does not depend on scheduling.
// The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace hypadams
