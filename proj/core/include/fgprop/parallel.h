#ifndef FGPROP_PARALLEL_H_
#define FGPROP_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace fgprop {

// Worker count: FGPROP_NUM_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Each index runs exactly once; callers write
// results into per-index slots and reduce them in index order, so output
// never depends on the worker count. The exception thrown for the lowest index
// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace fgprop

#endif  // FGPROP_PARALLEL_H_
