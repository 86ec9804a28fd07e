#ifndef REIFKB_HASH_H_
#define REIFKB_HASH_H_

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace reifkb {

// 64-bit FNV-1a, used for content fingerprints and split assignment.
class Fnv1a {
 public:
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  // Integers are hashed as little-endian bytes regardless of host order.
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      unsigned char b = static_cast<unsigned char>(v >> (8 * i));
      Bytes(&b, 1);
    }
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Str(std::string_view s) {
    U64(s.size());
    Bytes(s.data(), s.size());
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t HashString(std::string_view s) {
  Fnv1a h;
  h.Bytes(s.data(), s.size());
  return h.digest();
}

std::string HexDigest(std::uint64_t v);

}  // namespace reifkb

#endif  // REIFKB_HASH_H_
