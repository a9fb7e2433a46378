#pragma once

#include <cstddef>
#include <functional>

namespace micromorph {

/// Worker count: MICROMORPH_THREADS if set (>= 1), else hardware concurrency.
[[nodiscard]] int worker_count();
/// Override for the current process (0 restores the environment/hardware default).
void set_worker_count(int n);

/// Runs body(begin, end) over [0, n) split into contiguous chunks, one per worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace micromorph
