#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chromainv::detail {

// Runs task(i) for i in [0, n) on up to `threads` workers and rethrows the
// failure with the lowest index.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task task)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::mutex mutex;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto worker = [&](unsigned tid) {
    for (std::size_t i = tid; i < n; i += threads) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        return;
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker, t);
  }
  if (error)
    std::rethrow_exception(error);
}

} // namespace chromainv::detail
