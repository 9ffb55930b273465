#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "blpk/error.hpp"

namespace testsupport {

using Bytes = std::vector<std::uint8_t>;

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& v : b) v = static_cast<std::uint8_t>(rng());
  return b;
}

/// Deterministic buffer that mixes compressible and incompressible stretches,
/// so both the LZ path and the raw fallback get exercised.
inline Bytes mixed_bytes(std::size_t n, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  Bytes b(n);
  std::size_t i = 0;
  while (i < n) {
    const std::size_t stretch = std::min<std::size_t>(n - i, 1024 + rng() % 4096);
    switch (rng() % 4) {
      case 0: {  // constant run
        const auto v = static_cast<std::uint8_t>(rng());
        for (std::size_t k = 0; k < stretch; ++k) b[i + k] = v;
        break;
      }
      case 1:  // ramp (arange-like)
        for (std::size_t k = 0; k < stretch; ++k) b[i + k] = static_cast<std::uint8_t>((i + k) / 8);
        break;
      case 2: {  // short period
        const std::size_t period = 2 + rng() % 16;
        for (std::size_t k = 0; k < stretch; ++k)
          b[i + k] = static_cast<std::uint8_t>((i + k) % period * 37);
        break;
      }
      case 3:  // noise
        for (std::size_t k = 0; k < stretch; ++k) b[i + k] = static_cast<std::uint8_t>(rng());
        break;
    }
    i += stretch;
  }
  return b;
}

inline Bytes read_file_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  is.seekg(0, std::ios::end);
  Bytes b(static_cast<std::size_t>(is.tellg()));
  is.seekg(0);
  is.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size()));
  return b;
}

inline void write_file_bytes(const std::filesystem::path& p, std::span<const std::uint8_t> b) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  REQUIRE(os.good());
  os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

/// Scratch directory wiped on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

#define CHECK_BLPK_THROWS(expected, expr)                   \
  do {                                                      \
    try {                                                   \
      (void)(expr);                                         \
      FAIL_CHECK("expected " #expr " to throw " #expected); \
    } catch (const blpk::Error& thrown) {                   \
      CHECK(thrown.code() == (expected));                   \
    }                                                       \
  } while (0)

}  // namespace testsupport
