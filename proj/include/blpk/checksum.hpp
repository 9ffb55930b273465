#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace blpk {

enum class Checksum : std::uint8_t {
  none = 0,
  adler32 = 1,
  crc32 = 2,
  sha256 = 3,
};

/// Digest length in bytes: 0, 4, 4 or 32.
std::size_t checksum_size(Checksum id);

bool checksum_valid_id(std::uint8_t raw);

const char* checksum_name(Checksum id);

/// Parses "none"/"adler32"/"crc32"/"sha256"; throws invalid_argument otherwise.
Checksum checksum_from_name(const std::string& name);

/// 4-byte digests are stored LE; sha256 is the usual big-endian digest bytes.
std::vector<std::uint8_t> compute_checksum(Checksum id, std::span<const std::uint8_t> data);

}  // namespace blpk
