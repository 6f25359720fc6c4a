#include "hjra/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace hjra {

namespace {
int g_threads = 0;  // 0 = use hardware concurrency
}

int num_threads() {
  if (g_threads > 0) return g_threads;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

void set_num_threads(int n) { g_threads = n; }

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  const int nt = std::max(1, num_threads());
  if (nt == 1 || n < 4096) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace hjra
