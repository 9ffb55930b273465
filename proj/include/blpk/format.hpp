#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blpk/checksum.hpp"

// Container header, metadata section and offsets table. Layouts are normative
// and bit-exact; golden vectors live in tests/golden/.

namespace blpk {

inline constexpr std::array<char, 4> kMagic = {'b', 'l', 'p', 'k'};
inline constexpr std::uint8_t kFormatVersion = 3;
inline constexpr std::size_t kHeaderSize = 32;

inline constexpr std::uint8_t kOptionOffsets = 0x01;
inline constexpr std::uint8_t kOptionMetadata = 0x02;

// File header, 32 bytes:
//
//   byte  0..3   magic "blpk"
//   byte  4      format version (3)
//   byte  5      options: bit0 offsets present, bit1 metadata present
//   byte  6      checksum id: 0 none, 1 adler32, 2 crc32, 3 sha256
//   byte  7      typesize in bytes (1..255)
//   byte  8..11  chunk_size       i32 LE, bytes per full chunk
//   byte 12..15  last_chunk       i32 LE, bytes in the final chunk
//   byte 16..23  nchunks          i64 LE, chunks present
//   byte 24..31  max_app_chunks   i64 LE, free pre-allocated chunk slots
struct FileHeader {
  std::uint8_t format_version = kFormatVersion;
  std::uint8_t options = 0;
  Checksum checksum = Checksum::none;
  std::uint8_t typesize = 8;
  std::int32_t chunk_size = 1 << 20;
  std::int32_t last_chunk = 0;
  std::int64_t nchunks = 1;
  std::int64_t max_app_chunks = 0;

  bool offsets_present() const { return options & kOptionOffsets; }
  bool metadata_present() const { return options & kOptionMetadata; }
  std::int64_t total_slots() const { return nchunks + max_app_chunks; }
  std::int64_t data_bytes() const {
    return (nchunks - 1) * static_cast<std::int64_t>(chunk_size) + last_chunk;
  }

  bool operator==(const FileHeader&) const = default;
};

std::array<std::uint8_t, kHeaderSize> encode_header(const FileHeader& h);

/// Consumes the first 32 bytes of `b`.
FileHeader decode_header(std::span<const std::uint8_t> b);

/// Throws InvalidHeader if any field is out of range.
void validate_header(const FileHeader& h);

// Metadata section: 12-byte local header (used_size u32 LE, alloc_size u32 LE,
// checksum id u8, 3 zero bytes), alloc_size payload bytes (zero padded past
// used_size), then a checksum of the used payload when the id is not none.
struct MetadataSection {
  std::string payload;
  std::uint32_t alloc_size = 0;
  Checksum checksum = Checksum::none;

  bool operator==(const MetadataSection&) const = default;
};

inline constexpr std::size_t kMetadataLocalHeaderSize = 12;

std::size_t metadata_section_size(const MetadataSection& m);
std::vector<std::uint8_t> encode_metadata_section(const MetadataSection& m);
MetadataSection decode_metadata_section(std::span<const std::uint8_t> b);

// Offsets table: one i64 LE absolute file offset per slot, -1 in unused
// pre-allocated slots.
inline constexpr std::int64_t kUnusedOffset = -1;

struct OffsetsTable {
  std::vector<std::int64_t> entries;

  bool operator==(const OffsetsTable&) const = default;
};

std::vector<std::uint8_t> encode_offsets(const OffsetsTable& t);
OffsetsTable decode_offsets(std::span<const std::uint8_t> b, std::size_t n_slots);

}  // namespace blpk
