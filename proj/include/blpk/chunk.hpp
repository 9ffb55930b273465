#pragma once

#include <cstdint>
#include <span>
#include <vector>

// One compressed chunk. Frame layout, normative and bit-exact:
//
//   byte  0      codec version (1)
//   byte  1      flags: bit0 shuffled, bit1 stored_raw
//   byte  2      typesize
//   byte  3      reserved, zero
//   byte  4..7   nbytes     u32 LE, uncompressed length
//   byte  8..11  block_size u32 LE
//   byte 12..15  cbytes     u32 LE, total frame length including this header
//
// A regular frame continues with one u32 LE per block (the compressed size of
// that block; a block whose size equals its uncompressed size is stored raw)
// and then the concatenated block payloads. A stored_raw frame carries the
// whole input verbatim instead, with no block index.

namespace blpk {

inline constexpr std::uint8_t kCodecVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 16;
inline constexpr std::uint8_t kFlagShuffled = 0x01;
inline constexpr std::uint8_t kFlagStoredRaw = 0x02;
inline constexpr std::int64_t kMaxChunkBytes = 0x7fffffff;

struct CodecParams {
  int level = 7;              // 0 disables compression entirely
  bool shuffle = true;        // applied only when typesize > 1
  unsigned typesize = 8;      // bytes per element, 1..255
  std::uint32_t block_size = 0;  // 0 derives from the cache-fit rule
  int n_threads = 1;
  std::uint32_t l1_cache = 32u * 1024;   // levels <= 6 target L1
  std::uint32_t l2_cache = 256u * 1024;  // levels > 6 target L2
};

struct FrameInfo {
  std::uint8_t codec_version = kCodecVersion;
  bool shuffled = false;
  bool stored_raw = false;
  std::uint8_t typesize = 1;
  std::uint32_t nbytes = 0;
  std::uint32_t block_size = 0;
  std::uint32_t cbytes = 0;

  std::size_t block_count() const {
    return block_size ? (static_cast<std::size_t>(nbytes) + block_size - 1) / block_size : 0;
  }
};

/// Largest multiple of typesize that fits both the cache target for `level`
/// (L1 up to level 6, L2 above) and `nbytes`; never below typesize.
std::uint32_t block_size_for(int level, unsigned typesize, std::uint64_t nbytes,
                             std::uint32_t l1, std::uint32_t l2);

void validate_codec_params(const CodecParams& p);

/// Compresses one chunk; blocks are processed in parallel over p.n_threads
/// workers but the output bytes do not depend on the thread count.
std::vector<std::uint8_t> compress_chunk(const CodecParams& p, std::span<const std::uint8_t> buf);

FrameInfo parse_frame_header(std::span<const std::uint8_t> frame);

/// Exact inverse of compress_chunk. `out` must be frame.nbytes long.
void decompress_chunk_into(std::span<const std::uint8_t> frame, std::span<std::uint8_t> out,
                           int n_threads = 1);

std::vector<std::uint8_t> decompress_chunk(std::span<const std::uint8_t> frame, int n_threads = 1);

}  // namespace blpk
