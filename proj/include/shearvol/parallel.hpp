#pragma once

#include <cstddef>
#include <functional>

namespace shearvol {

/// How a call may spread work across threads.
struct ExecutionPolicy {
  /// Requested worker count; 0 picks the hardware concurrency. Either way the
  /// result is capped by the SHEARVOL_THREADS environment variable if set.
  int threads = 0;
  /// Accumulate per-filter contributions in filter order, making results
  /// bitwise independent of the thread count.
  bool deterministic = false;
};

/// Effective worker count for a policy (always >= 1).
int resolve_threads(const ExecutionPolicy& policy);

/// Runs body(i, worker) for i in [0, n) on up to `threads` workers.
/// Indices are handed out dynamically; body must not depend on which worker
/// runs which index except through per-worker scratch selected by `worker`.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, int)>& body);

}  // namespace shearvol
