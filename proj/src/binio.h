#ifndef REIFKB_SRC_BINIO_H_
#define REIFKB_SRC_BINIO_H_

// Little-endian fixed-width readers and writers for the binary formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "reifkb/errors.h"

namespace reifkb::binio {

inline void PutU32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void PutU64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline void PutF64(std::ostream& out, double v) { PutU64(out, std::bit_cast<std::uint64_t>(v)); }

inline void GetBytes(std::istream& in, unsigned char* b, std::size_t n, const char* what) {
  in.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw ConfigError(std::string("truncated binary file while reading ") + what);
  }
}

inline std::uint32_t GetU32(std::istream& in, const char* what) {
  unsigned char b[4];
  GetBytes(in, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t GetU64(std::istream& in, const char* what) {
  unsigned char b[8];
  GetBytes(in, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double GetF64(std::istream& in, const char* what) {
  return std::bit_cast<double>(GetU64(in, what));
}

}  // namespace reifkb::binio

#endif  // REIFKB_SRC_BINIO_H_
