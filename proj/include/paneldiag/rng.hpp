#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace paneldiag {

/// The single pseudo-random engine used throughout the toolkit.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from (master seed, stream name, index).
///
/// Every parallel loop draws its randomness from `make_rng(master, stream, i)` for
/// loop index `i`, so results never depend on how indices are scheduled on threads.
/// The mixing is FNV-1a over the stream name followed by splitmix64 finalizers.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                        std::uint64_t index) noexcept;

[[nodiscard]] Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index);

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
[[nodiscard]] double uniform01(Rng& rng) noexcept;

/// Uniform integer in [0, bound). `bound` must be positive. Unbiased (Lemire's method).
[[nodiscard]] std::size_t uniform_index(Rng& rng, std::size_t bound) noexcept;

/// In-place Fisher-Yates shuffle. Portable replacement for std::shuffle, whose
/// output is implementation-defined.
template <class T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace paneldiag
