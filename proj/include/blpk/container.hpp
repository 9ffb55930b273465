#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blpk/chunk.hpp"
#include "blpk/format.hpp"

// Whole-file layout:
//
//   |-header-|-meta-|-offsets-|-chunk-|-checksum-|-chunk-|-checksum-|...|
//
// header is 32 bytes; meta and offsets are optional per the header options;
// every chunk frame is followed by a checksum of the compressed frame bytes
// when the header checksum id is not none. The offsets table holds
// nchunks + max_app_chunks slots so chunks can be appended in place later.

namespace blpk {

struct PackArgs {
  CodecParams codec;
  std::int32_t chunk_size = 1 << 20;
  Checksum checksum = Checksum::adler32;
  bool offsets_enabled = true;
  std::int64_t max_app_chunks = -1;  // -1: 10 * nchunks, capped to the slot limit
  std::optional<std::string> metadata;
  std::optional<std::uint32_t> metadata_alloc;  // default: 10 * payload size
};

struct FileInfo {
  FileHeader header;
  std::optional<std::string> metadata;
  std::optional<std::vector<std::int64_t>> offsets;
  std::vector<std::uint32_t> chunk_cbytes;
  std::uint64_t file_bytes = 0;
  std::uint64_t data_bytes = 0;
  double ratio = 0.0;  // data_bytes / file_bytes
};

struct UnpackResult {
  std::optional<std::string> metadata;
  std::uint64_t nbytes = 0;
};

/// Streams src_size bytes from `source` into a new container on `sink`.
/// Needs a seekable sink when offsets are enabled (they are back-patched
/// after the chunks are written).
FileInfo pack(std::istream& source, std::uint64_t src_size, std::ostream& sink,
              const PackArgs& args);

/// Verifies each chunk checksum before decompressing it, then streams the
/// plain bytes to `sink`. Transient memory stays proportional to chunk_size.
UnpackResult unpack(std::istream& source, std::ostream& sink);

/// Appends src_size bytes as new chunks into the pre-allocated offset slots,
/// updating the header in place. The existing last chunk must be full.
/// Returns the new chunk count.
std::int64_t append(std::iostream& file, std::istream& source, std::uint64_t src_size,
                    const CodecParams& codec = CodecParams{});

/// Header, metadata, offsets and per-chunk compressed sizes; never
/// decompresses payload data.
FileInfo info(std::istream& source);

// Path convenience wrappers (the CLI entry points).
FileInfo pack_file(const std::filesystem::path& in, const std::filesystem::path& out,
                   const PackArgs& args);
UnpackResult unpack_file(const std::filesystem::path& in, const std::filesystem::path& out);
std::int64_t append_file(const std::filesystem::path& file, const std::filesystem::path& in,
                         const CodecParams& codec = CodecParams{});
FileInfo info_file(const std::filesystem::path& in);

inline constexpr const char* kDefaultExtension = ".blp";

}  // namespace blpk
