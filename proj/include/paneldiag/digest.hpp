#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace paneldiag {

using Sha256Digest = std::array<std::uint8_t, 32>;

[[nodiscard]] Sha256Digest sha256(std::string_view bytes);
[[nodiscard]] std::string sha256_hex(std::string_view bytes);

/// First eight digest bytes read as a big-endian unsigned integer.
[[nodiscard]] std::uint64_t sha256_prefix_u64(std::string_view bytes);

}  // namespace paneldiag
