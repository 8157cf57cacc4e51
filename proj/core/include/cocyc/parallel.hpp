#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cocyc {

// Runs f(i) for i in [0, count) across `workers` threads. Each index writes
// into caller-owned storage, so results are independent of the partition and
// any reduction done afterwards in index order is deterministic.
template <class F>
void parallel_for(std::size_t count, int workers, F&& f) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += nthreads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace cocyc
