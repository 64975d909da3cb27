#pragma once

#include <cstddef>
#include <functional>

namespace otgforge {

// Worker count: hardware concurrency capped by the OTG_FORGE_THREADS
// environment variable (when set to a positive integer).
std::size_t worker_count();

// Calls fn(i) for every i in [0, n), split into contiguous chunks across
// worker_count() threads. fn must only write to slot i of its outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace otgforge
