#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bellmem::detail {

inline unsigned resolve_workers(unsigned requested, std::uint64_t items) {
  unsigned w = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (items < w) w = static_cast<unsigned>(std::max<std::uint64_t>(1, items));
  return w;
}

/// Splits [0, items) into `workers` contiguous chunks and runs
/// body(chunk, begin, end) for each. The first exception is rethrown.
template <typename Body>
void run_chunks(std::uint64_t items, unsigned workers, Body&& body) {
  if (workers <= 1) {
    body(0U, std::uint64_t{0}, items);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = items * w / workers;
    const std::uint64_t end = items * (w + 1) / workers;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bellmem::detail
