#include "shearvol/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace shearvol {

int resolve_threads(const ExecutionPolicy& policy) {
  int n = policy.threads;
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SHEARVOL_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // unparsable cap is ignored
    }
  }
  return std::max(1, n);
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, int)>& body) {
  if (n == 0) return;
  const int workers = static_cast<int>(std::min<std::size_t>(std::max(1, threads), n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](int worker) {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i, worker);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace shearvol
