#include "mmsurf/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace mmsurf {

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  if (workers <= 0) workers = default_workers();
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  if (n <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(n);
  threads.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t begin = count * w / n;
    std::size_t end = count * (w + 1) / n;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mmsurf
