#include "paneldiag/digest.hpp"

#include <openssl/sha.h>

namespace paneldiag {

Sha256Digest sha256(std::string_view bytes) {
  Sha256Digest digest{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest.data());
  return digest;
}

std::string sha256_hex(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  const Sha256Digest digest = sha256(bytes);
  std::string out;
  out.reserve(digest.size() * 2);
  for (const std::uint8_t b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::uint64_t sha256_prefix_u64(std::string_view bytes) {
  const Sha256Digest digest = sha256(bytes);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u = (u << 8) | digest[static_cast<std::size_t>(i)];
  return u;
}

}  // namespace paneldiag
