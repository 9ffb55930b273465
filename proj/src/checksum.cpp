#include "blpk/checksum.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <limits>
#include <string>

#include "blpk/detail/bytes.hpp"
#include "blpk/error.hpp"

namespace blpk {

std::size_t checksum_size(Checksum id) {
  switch (id) {
    case Checksum::none:
      return 0;
    case Checksum::adler32:
    case Checksum::crc32:
      return 4;
    case Checksum::sha256:
      return 32;
  }
  throw Error(ErrorCode::invalid_argument, "unknown checksum id");
}

bool checksum_valid_id(std::uint8_t raw) { return raw <= 3; }

const char* checksum_name(Checksum id) {
  switch (id) {
    case Checksum::none:
      return "none";
    case Checksum::adler32:
      return "adler32";
    case Checksum::crc32:
      return "crc32";
    case Checksum::sha256:
      return "sha256";
  }
  return "invalid";
}

Checksum checksum_from_name(const std::string& name) {
  if (name == "none") return Checksum::none;
  if (name == "adler32") return Checksum::adler32;
  if (name == "crc32") return Checksum::crc32;
  if (name == "sha256") return Checksum::sha256;
  throw Error(ErrorCode::invalid_argument, "unknown checksum name '" + name + "'");
}

namespace {

// zlib takes uInt lengths; feed long buffers piecewise.
template <typename Fn>
std::uint32_t rolling32(Fn step, std::uint32_t state, std::span<const std::uint8_t> data) {
  constexpr std::size_t kStep = 1u << 30;
  while (!data.empty()) {
    std::size_t n = std::min(kStep, data.size());
    state = static_cast<std::uint32_t>(step(state, data.data(), static_cast<uInt>(n)));
    data = data.subspan(n);
  }
  return state;
}

}  // namespace

std::vector<std::uint8_t> compute_checksum(Checksum id, std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out(checksum_size(id));
  switch (id) {
    case Checksum::none:
      break;
    case Checksum::adler32: {
      std::uint32_t v = rolling32(::adler32, static_cast<std::uint32_t>(::adler32(0L, Z_NULL, 0)), data);
      detail::put_u32le(out.data(), v);
      break;
    }
    case Checksum::crc32: {
      std::uint32_t v = rolling32(::crc32, static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0)), data);
      detail::put_u32le(out.data(), v);
      break;
    }
    case Checksum::sha256: {
      unsigned int len = 0;
      if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32)
        throw Error(ErrorCode::io_error, "sha256 digest failed");
      break;
    }
  }
  return out;
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_magic:
      return "BadMagic";
    case ErrorCode::unsupported_version:
      return "UnsupportedVersion";
    case ErrorCode::invalid_header:
      return "InvalidHeader";
    case ErrorCode::invalid_metadata:
      return "InvalidMetadata";
    case ErrorCode::metadata_checksum_mismatch:
      return "MetadataChecksumMismatch";
    case ErrorCode::truncated_offsets:
      return "TruncatedOffsets";
    case ErrorCode::corrupt_frame:
      return "CorruptFrame";
    case ErrorCode::corrupt_block:
      return "CorruptBlock";
    case ErrorCode::chunk_too_large:
      return "ChunkTooLarge";
    case ErrorCode::checksum_mismatch:
      return "ChecksumMismatch";
    case ErrorCode::sink_not_seekable:
      return "SinkNotSeekable";
    case ErrorCode::no_append_space:
      return "NoAppendSpace";
    case ErrorCode::append_to_partial_chunk:
      return "AppendToPartialChunk";
    case ErrorCode::no_offsets:
      return "NoOffsets";
    case ErrorCode::descriptor_mismatch:
      return "DescriptorMismatch";
    case ErrorCode::not_an_array_file:
      return "NotAnArrayFile";
    case ErrorCode::invalid_dtype:
      return "InvalidDtype";
    case ErrorCode::empty_samples:
      return "EmptySamples";
    case ErrorCode::invalid_argument:
      return "InvalidArgument";
    case ErrorCode::io_error:
      return "IoError";
  }
  return "UnknownError";
}

}  // namespace blpk
