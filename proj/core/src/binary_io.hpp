#pragma once

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "infgrand/error.hpp"

namespace infgrand::detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

inline void write_f64s(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) write_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

inline std::uint64_t read_uint(std::istream& in, int width, const std::string& what) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), width)) throw IoError(what + ": truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint32_t read_u32(std::istream& in, const std::string& what) {
  return static_cast<std::uint32_t>(read_uint(in, 4, what));
}

inline std::uint64_t read_u64(std::istream& in, const std::string& what) {
  return read_uint(in, 8, what);
}

inline std::vector<double> read_f64s(std::istream& in, std::size_t count, const std::string& what) {
  std::vector<double> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(count * sizeof(double))))
      throw IoError(what + ": truncated payload");
  } else {
    for (auto& v : values) v = std::bit_cast<double>(read_u64(in, what));
  }
  return values;
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
  char got[4] = {};
  if (!in.read(got, 4) || std::string(got, 4) != std::string(magic, 4))
    throw IoError(what + ": bad magic, expected '" + std::string(magic, 4) + "'");
}

}  // namespace infgrand::detail
