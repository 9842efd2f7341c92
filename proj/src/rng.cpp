#include "paneldiag/rng.hpp"

namespace paneldiag {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a(stream));
  return splitmix64(h ^ splitmix64(index));
}

Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  return Rng{derive_seed(master, stream, index)};
}

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

__extension__ using Wide = unsigned __int128;

std::size_t uniform_index(Rng& rng, std::size_t bound) noexcept {
  const auto range = static_cast<std::uint64_t>(bound);
  Wide m = static_cast<Wide>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<Wide>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

}  // namespace paneldiag
