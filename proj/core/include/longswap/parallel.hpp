#ifndef LONGSWAP_PARALLEL_HPP
#define LONGSWAP_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace longswap {

// Resolves a worker count. A positive request wins; zero or negative falls
// back to the LONGSWAP_THREADS environment variable, then to the hardware
// concurrency, and never returns less than one.
int resolve_thread_count(int requested);

// Runs body(i) for every i in [0, n) on up to `threads` workers. Iterations
// are split into contiguous blocks, and the call joins all workers before
// returning. Bodies must only write state owned by their own index so the
// result is independent of the schedule; reductions should be done by the
// caller in index order afterwards. The first exception thrown by a body is
// rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (n == 0) return;
  std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  if (workers > n) workers = n;
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace longswap

#endif  // LONGSWAP_PARALLEL_HPP
