#ifndef HWLAB_PARALLEL_HPP
#define HWLAB_PARALLEL_HPP

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace hwlab {

// global worker budget for embarrassingly parallel sample loops; results are
// written to per-index slots, so reductions stay order-independent
std::atomic<int>& max_threads();
void set_max_threads(int n);

// run fn(i) for i in [0, n) over the worker budget
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace hwlab

#endif
