#include "hwlab/parallel.hpp"

#include <algorithm>

namespace hwlab {

std::atomic<int>& max_threads() {
  static std::atomic<int> n{1};
  return n;
}

void set_max_threads(int n) { max_threads().store(std::max(1, n)); }

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(max_threads().load(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

} // namespace hwlab
