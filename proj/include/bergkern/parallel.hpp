#pragma once

#include <cstddef>
#include <functional>

namespace bergkern {

// Worker count used when callers pass threads <= 0.
void set_default_threads(int threads);
int default_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// is visited exactly once; callers write results into preallocated slots so
// output order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads = 0);

}  // namespace bergkern
