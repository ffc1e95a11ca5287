#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace magscat {

// Runs f(0..n-1) on up to `workers` threads. Jobs write results into
// index-keyed slots, so the output is identical regardless of scheduling.
// The first job exception is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (n == 0) return;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
      } catch (...) {
        errs[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace magscat
