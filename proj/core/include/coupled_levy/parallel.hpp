#pragma once

#include <cstddef>
#include <functional>

namespace coupled_levy {

/// Worker count: COUPLED_LEVY_THREADS when set to a positive integer,
/// otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(begin, end, worker) over static contiguous chunks of [0, n).
/// Callers write results by index, so the outcome is independent of the
/// number of workers.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace coupled_levy
