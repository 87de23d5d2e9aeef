#pragma once

#include <cstddef>
#include <functional>

namespace kinex {

/// Worker count: KINEX_THREADS when set to a positive integer, else the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Exceptions from any
/// worker are rethrown on the caller, the one with the lowest index first.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kinex
