#include "paneldiag/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace paneldiag {
namespace {

std::atomic<unsigned> g_max_threads{std::max(1U, std::thread::hardware_concurrency())};

}  // namespace

void set_max_threads(unsigned threads) noexcept { g_max_threads.store(std::max(1U, threads)); }

unsigned max_threads() noexcept { return g_max_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> failed{false};
  const std::size_t chunk = (count + workers - 1) / workers;

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end && !failed.load(std::memory_order_relaxed); ++i) {
          body(i);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        failed = true;
      }
    });
  }
  pool.clear();  // joins
  if (failure) std::rethrow_exception(failure);
}

}  // namespace paneldiag
