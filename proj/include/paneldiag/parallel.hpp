#pragma once

#include <cstddef>
#include <functional>

namespace paneldiag {

/// Caps the number of worker threads used by parallel loops (minimum 1).
void set_max_threads(unsigned threads) noexcept;
[[nodiscard]] unsigned max_threads() noexcept;

/// Runs `body(i)` for every i in [0, count), split into contiguous chunks over at most
/// max_threads() threads. Callers write into per-index slots and reduce afterwards in
/// index order, which keeps every result independent of the thread count.
/// The first exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace paneldiag
