#pragma once

#include <cstddef>
#include <functional>

namespace hacover {

// Number of workers for a job of the given size. Respects the HACOVER_THREADS
// environment variable as an upper bound.
std::size_t worker_count(std::size_t jobs);

// Runs fn over [0, n) split into contiguous chunks, one chunk per worker.
// Callers must write only to disjoint, index-addressed slots so results are
// identical to a sequential run.
void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& fn);

}  // namespace hacover
