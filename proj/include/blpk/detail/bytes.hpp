#pragma once

#include <cstdint>
#include <cstring>

// Little-endian scalar packing. All on-disk integers are LE.

namespace blpk::detail {

inline void put_u32le(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
  p[2] = static_cast<std::uint8_t>(v >> 16);
  p[3] = static_cast<std::uint8_t>(v >> 24);
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_u64le(std::uint8_t* p, std::uint64_t v) {
  put_u32le(p, static_cast<std::uint32_t>(v));
  put_u32le(p + 4, static_cast<std::uint32_t>(v >> 32));
}

inline std::uint64_t get_u64le(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(get_u32le(p)) | (static_cast<std::uint64_t>(get_u32le(p + 4)) << 32);
}

inline void put_i32le(std::uint8_t* p, std::int32_t v) {
  put_u32le(p, static_cast<std::uint32_t>(v));
}

inline std::int32_t get_i32le(const std::uint8_t* p) {
  std::uint32_t u = get_u32le(p);
  std::int32_t v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

inline void put_i64le(std::uint8_t* p, std::int64_t v) {
  put_u64le(p, static_cast<std::uint64_t>(v));
}

inline std::int64_t get_i64le(const std::uint8_t* p) {
  std::uint64_t u = get_u64le(p);
  std::int64_t v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

}  // namespace blpk::detail
