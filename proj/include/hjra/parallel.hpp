#pragma once

#include <cstddef>
#include <functional>

namespace hjra {

// Worker count used by parallel sweeps. Defaults to hardware concurrency;
// results are identical for any count (chunk outputs are disjoint and
// reductions use max, which is order-independent).
int num_threads();
void set_num_threads(int n);

// Runs fn(begin, end) over a fixed partition of [0, n) into num_threads()
// contiguous chunks.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace hjra
