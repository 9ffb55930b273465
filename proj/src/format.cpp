#include "blpk/format.hpp"

#include <cstring>
#include <limits>

#include "blpk/detail/bytes.hpp"
#include "blpk/error.hpp"

namespace blpk {

void validate_header(const FileHeader& h) {
  if (h.format_version != kFormatVersion)
    throw Error(ErrorCode::invalid_header, "format version must be 3");
  if (h.options & ~(kOptionOffsets | kOptionMetadata))
    throw Error(ErrorCode::invalid_header, "reserved option bits set");
  if (!checksum_valid_id(static_cast<std::uint8_t>(h.checksum)))
    throw Error(ErrorCode::invalid_header, "unknown checksum id");
  if (h.typesize < 1) throw Error(ErrorCode::invalid_header, "typesize must be in 1..255");
  if (h.chunk_size < 1) throw Error(ErrorCode::invalid_header, "chunk_size must be positive");
  if (h.last_chunk < 0 || h.last_chunk > h.chunk_size)
    throw Error(ErrorCode::invalid_header, "last_chunk must be in 0..chunk_size");
  if (h.nchunks < 1) throw Error(ErrorCode::invalid_header, "nchunks must be >= 1");
  if (h.max_app_chunks < 0) throw Error(ErrorCode::invalid_header, "max_app_chunks must be >= 0");
  if (h.max_app_chunks > std::numeric_limits<std::int64_t>::max() - h.nchunks)
    throw Error(ErrorCode::invalid_header, "nchunks + max_app_chunks overflows");
}

std::array<std::uint8_t, kHeaderSize> encode_header(const FileHeader& h) {
  validate_header(h);
  std::array<std::uint8_t, kHeaderSize> b{};
  std::memcpy(b.data(), kMagic.data(), 4);
  b[4] = h.format_version;
  b[5] = h.options;
  b[6] = static_cast<std::uint8_t>(h.checksum);
  b[7] = h.typesize;
  detail::put_i32le(&b[8], h.chunk_size);
  detail::put_i32le(&b[12], h.last_chunk);
  detail::put_i64le(&b[16], h.nchunks);
  detail::put_i64le(&b[24], h.max_app_chunks);
  return b;
}

FileHeader decode_header(std::span<const std::uint8_t> b) {
  if (b.size() < kHeaderSize) throw Error(ErrorCode::invalid_header, "buffer shorter than 32 bytes");
  if (std::memcmp(b.data(), kMagic.data(), 4) != 0)
    throw Error(ErrorCode::bad_magic, "not a blpk file");
  if (b[4] != kFormatVersion)
    throw Error(ErrorCode::unsupported_version,
                "format version " + std::to_string(b[4]) + " not supported");
  FileHeader h;
  h.format_version = b[4];
  h.options = b[5];
  if (!checksum_valid_id(b[6])) throw Error(ErrorCode::invalid_header, "unknown checksum id");
  h.checksum = static_cast<Checksum>(b[6]);
  h.typesize = b[7];
  h.chunk_size = detail::get_i32le(&b[8]);
  h.last_chunk = detail::get_i32le(&b[12]);
  h.nchunks = detail::get_i64le(&b[16]);
  h.max_app_chunks = detail::get_i64le(&b[24]);
  validate_header(h);
  return h;
}

std::size_t metadata_section_size(const MetadataSection& m) {
  return kMetadataLocalHeaderSize + m.alloc_size + checksum_size(m.checksum);
}

std::vector<std::uint8_t> encode_metadata_section(const MetadataSection& m) {
  if (m.payload.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::invalid_metadata, "payload too large");
  const auto used = static_cast<std::uint32_t>(m.payload.size());
  if (used > m.alloc_size)
    throw Error(ErrorCode::invalid_metadata, "used_size exceeds alloc_size");
  std::vector<std::uint8_t> b(metadata_section_size(m), 0);
  detail::put_u32le(&b[0], used);
  detail::put_u32le(&b[4], m.alloc_size);
  b[8] = static_cast<std::uint8_t>(m.checksum);
  std::memcpy(b.data() + kMetadataLocalHeaderSize, m.payload.data(), used);
  if (m.checksum != Checksum::none) {
    auto digest = compute_checksum(
        m.checksum, std::span<const std::uint8_t>(b.data() + kMetadataLocalHeaderSize, used));
    std::memcpy(b.data() + kMetadataLocalHeaderSize + m.alloc_size, digest.data(), digest.size());
  }
  return b;
}

MetadataSection decode_metadata_section(std::span<const std::uint8_t> b) {
  if (b.size() < kMetadataLocalHeaderSize)
    throw Error(ErrorCode::invalid_metadata, "metadata local header truncated");
  const std::uint32_t used = detail::get_u32le(&b[0]);
  const std::uint32_t alloc = detail::get_u32le(&b[4]);
  if (!checksum_valid_id(b[8])) throw Error(ErrorCode::invalid_metadata, "unknown checksum id");
  const auto cksum = static_cast<Checksum>(b[8]);
  if (used > alloc) throw Error(ErrorCode::invalid_metadata, "used_size exceeds alloc_size");
  const std::size_t total = kMetadataLocalHeaderSize + static_cast<std::size_t>(alloc) + checksum_size(cksum);
  if (b.size() < total) throw Error(ErrorCode::invalid_metadata, "metadata section truncated");
  MetadataSection m;
  m.alloc_size = alloc;
  m.checksum = cksum;
  m.payload.assign(reinterpret_cast<const char*>(b.data() + kMetadataLocalHeaderSize), used);
  if (cksum != Checksum::none) {
    auto digest = compute_checksum(
        cksum, std::span<const std::uint8_t>(b.data() + kMetadataLocalHeaderSize, used));
    if (std::memcmp(digest.data(), b.data() + kMetadataLocalHeaderSize + alloc, digest.size()) != 0)
      throw Error(ErrorCode::metadata_checksum_mismatch, "metadata payload corrupted");
  }
  return m;
}

std::vector<std::uint8_t> encode_offsets(const OffsetsTable& t) {
  std::vector<std::uint8_t> b(t.entries.size() * 8);
  for (std::size_t i = 0; i < t.entries.size(); ++i) detail::put_i64le(&b[i * 8], t.entries[i]);
  return b;
}

OffsetsTable decode_offsets(std::span<const std::uint8_t> b, std::size_t n_slots) {
  if (b.size() < n_slots * 8)
    throw Error(ErrorCode::truncated_offsets,
                "need " + std::to_string(n_slots * 8) + " bytes, have " + std::to_string(b.size()));
  OffsetsTable t;
  t.entries.resize(n_slots);
  for (std::size_t i = 0; i < n_slots; ++i) t.entries[i] = detail::get_i64le(&b[i * 8]);
  return t;
}

}  // namespace blpk
