#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>

#include "blpk/error.hpp"
#include "blpk/format.hpp"

namespace blpk::detail {

inline void write_exact(std::ostream& os, const void* p, std::size_t len) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
  if (!os) throw Error(ErrorCode::io_error, "write failed");
}

inline void read_exact(std::istream& is, void* p, std::size_t len) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
  if (static_cast<std::size_t>(is.gcount()) != len)
    throw Error(ErrorCode::io_error, "unexpected end of stream");
}

FileHeader read_header(std::istream& is);

/// Reads the metadata section in front of the read cursor; is must sit right
/// after the 32-byte header. Returns the section and leaves the cursor after it.
MetadataSection read_metadata_section(std::istream& is);

/// Walks every chunk of an open container whose header was already consumed
/// (as were metadata and offsets), verifying the per-chunk checksum before
/// handing the frame bytes over. Throws ChecksumMismatch with the chunk index.
void walk_chunks(std::istream& is, const FileHeader& h,
                 const std::function<void(std::int64_t index, std::span<const std::uint8_t> frame)>& fn);

}  // namespace blpk::detail
