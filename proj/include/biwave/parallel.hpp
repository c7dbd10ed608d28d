#ifndef BIWAVE_PARALLEL_HPP
#define BIWAVE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace biwave {

// Intra-run worker cap: value of BIWAVE_THREADS clamped to [1, hardware],
// read once per process; 1 when unset or unparsable.
int worker_cap();

/*
 * Run fn over [0, n) split into one contiguous block per worker.  Blocks are
 * a pure function of (n, worker count), and workers write disjoint ranges,
 * so results are bit-identical to the serial loop regardless of scheduling.
 * Only pointwise node-local kernels go through here; reductions stay serial
 * to keep summation order fixed.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace biwave

#endif
