#include "blpk/chunk.hpp"

#include <algorithm>
#include <cstring>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blpk/detail/bytes.hpp"
#include "blpk/error.hpp"
#include "blpk/lz.hpp"
#include "blpk/shuffle.hpp"

namespace blpk {

namespace {

void encode_frame_header(std::uint8_t* p, const FrameInfo& f) {
  p[0] = f.codec_version;
  p[1] = static_cast<std::uint8_t>((f.shuffled ? kFlagShuffled : 0) |
                                   (f.stored_raw ? kFlagStoredRaw : 0));
  p[2] = f.typesize;
  p[3] = 0;
  detail::put_u32le(p + 4, f.nbytes);
  detail::put_u32le(p + 8, f.block_size);
  detail::put_u32le(p + 12, f.cbytes);
}

std::vector<std::uint8_t> make_raw_frame(unsigned typesize, std::uint32_t block_size,
                                         std::span<const std::uint8_t> buf) {
  FrameInfo f;
  f.stored_raw = true;
  f.typesize = static_cast<std::uint8_t>(typesize);
  f.nbytes = static_cast<std::uint32_t>(buf.size());
  f.block_size = block_size;
  f.cbytes = static_cast<std::uint32_t>(kFrameHeaderSize + buf.size());
  std::vector<std::uint8_t> frame(f.cbytes);
  encode_frame_header(frame.data(), f);
  std::memcpy(frame.data() + kFrameHeaderSize, buf.data(), buf.size());
  return frame;
}

// Runs fn(i) for i in [0, count) across nt workers, collecting the first
// exception instead of letting it escape the parallel region.
template <typename Fn>
void parallel_blocks(std::int64_t count, int nt, Fn&& fn) {
  std::exception_ptr err = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1 && count > 1)
#endif
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(blpk_block_error)
#endif
      {
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

std::uint32_t block_size_for(int level, unsigned typesize, std::uint64_t nbytes,
                             std::uint32_t l1, std::uint32_t l2) {
  if (level < 0 || level > 9) throw Error(ErrorCode::invalid_argument, "level must be in 0..9");
  if (typesize < 1 || typesize > 255)
    throw Error(ErrorCode::invalid_argument, "typesize must be in 1..255");
  const std::uint64_t target = level <= 6 ? l1 : l2;
  const std::uint64_t capped = std::min(nbytes, target);
  std::uint64_t bs = capped / typesize * typesize;
  if (bs < typesize) bs = typesize;
  return static_cast<std::uint32_t>(bs);
}

void validate_codec_params(const CodecParams& p) {
  if (p.level < 0 || p.level > 9) throw Error(ErrorCode::invalid_argument, "level must be in 0..9");
  if (p.typesize < 1 || p.typesize > 255)
    throw Error(ErrorCode::invalid_argument, "typesize must be in 1..255");
  if (p.n_threads < 1) throw Error(ErrorCode::invalid_argument, "n_threads must be >= 1");
  if (p.block_size != 0) {
    if (p.block_size > kMaxChunkBytes)
      throw Error(ErrorCode::invalid_argument, "block_size exceeds 2^31 - 1");
    if (p.shuffle && p.typesize > 1 && p.block_size % p.typesize != 0)
      throw Error(ErrorCode::invalid_argument, "block_size must be a multiple of typesize");
  }
}

std::vector<std::uint8_t> compress_chunk(const CodecParams& p, std::span<const std::uint8_t> buf) {
  validate_codec_params(p);
  const std::size_t n = buf.size();
  if (n > static_cast<std::size_t>(kMaxChunkBytes))
    throw Error(ErrorCode::chunk_too_large, "chunk exceeds 2^31 - 1 bytes");

  const std::uint32_t bs =
      p.block_size ? p.block_size : block_size_for(p.level, p.typesize, n, p.l1_cache, p.l2_cache);

  if (n == 0) {
    FrameInfo f;
    f.typesize = static_cast<std::uint8_t>(p.typesize);
    f.block_size = bs;
    f.cbytes = kFrameHeaderSize;
    std::vector<std::uint8_t> frame(kFrameHeaderSize);
    encode_frame_header(frame.data(), f);
    return frame;
  }

  if (p.level == 0) return make_raw_frame(p.typesize, bs, buf);

  const bool shuffled = p.shuffle && p.typesize > 1;
  // Scratch survives across chunks; reallocating a chunk-sized buffer per
  // call costs more than the transpose on incompressible data.
  thread_local std::vector<std::uint8_t> shuffle_scratch;
  std::span<const std::uint8_t> work = buf;
  if (shuffled) {
    if (shuffle_scratch.size() < n) shuffle_scratch.resize(n);
    const std::span<std::uint8_t> dst(shuffle_scratch.data(), n);
    shuffle_into(p.typesize, buf, dst, p.n_threads);
    work = dst;
  }

  const std::size_t nb = (n + bs - 1) / bs;
  std::vector<std::vector<std::uint8_t>> streams(nb);  // empty => block stored raw
  std::vector<std::uint32_t> sizes(nb);

  parallel_blocks(static_cast<std::int64_t>(nb), p.n_threads, [&](std::size_t b) {
    const std::size_t off = b * static_cast<std::size_t>(bs);
    const std::size_t len = std::min<std::size_t>(bs, n - off);
    auto compressed = lz_compress_block(p.level, work.subspan(off, len));
    if (compressed && compressed->size() < len) {
      sizes[b] = static_cast<std::uint32_t>(compressed->size());
      streams[b] = std::move(*compressed);
    } else {
      sizes[b] = static_cast<std::uint32_t>(len);
    }
  });

  std::uint64_t total_payload = 0;
  for (std::uint32_t s : sizes) total_payload += s;

  // Store fallback: no point keeping the framing when nothing shrank.
  if (total_payload >= n) return make_raw_frame(p.typesize, bs, buf);

  const std::uint64_t cbytes64 = kFrameHeaderSize + 4ull * nb + total_payload;
  if (cbytes64 > 0xffffffffull) throw Error(ErrorCode::chunk_too_large, "frame length overflows u32");

  FrameInfo f;
  f.shuffled = shuffled;
  f.typesize = static_cast<std::uint8_t>(p.typesize);
  f.nbytes = static_cast<std::uint32_t>(n);
  f.block_size = bs;
  f.cbytes = static_cast<std::uint32_t>(cbytes64);

  std::vector<std::uint8_t> frame(f.cbytes);
  encode_frame_header(frame.data(), f);
  std::uint8_t* idx = frame.data() + kFrameHeaderSize;
  std::uint8_t* payload = idx + 4 * nb;
  for (std::size_t b = 0; b < nb; ++b) {
    detail::put_u32le(idx + 4 * b, sizes[b]);
    if (streams[b].empty()) {
      const std::size_t off = b * static_cast<std::size_t>(bs);
      std::memcpy(payload, work.data() + off, sizes[b]);
    } else {
      std::memcpy(payload, streams[b].data(), sizes[b]);
    }
    payload += sizes[b];
  }
  return frame;
}

FrameInfo parse_frame_header(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderSize)
    throw Error(ErrorCode::corrupt_frame, "frame shorter than its header");
  FrameInfo f;
  f.codec_version = frame[0];
  if (f.codec_version != kCodecVersion)
    throw Error(ErrorCode::corrupt_frame, "unknown codec version " + std::to_string(frame[0]));
  const std::uint8_t flags = frame[1];
  if (flags & ~(kFlagShuffled | kFlagStoredRaw))
    throw Error(ErrorCode::corrupt_frame, "reserved flag bits set");
  f.shuffled = flags & kFlagShuffled;
  f.stored_raw = flags & kFlagStoredRaw;
  f.typesize = frame[2];
  if (f.typesize < 1) throw Error(ErrorCode::corrupt_frame, "typesize must be >= 1");
  if (frame[3] != 0) throw Error(ErrorCode::corrupt_frame, "reserved byte not zero");
  f.nbytes = detail::get_u32le(&frame[4]);
  f.block_size = detail::get_u32le(&frame[8]);
  f.cbytes = detail::get_u32le(&frame[12]);
  if (f.nbytes > static_cast<std::uint32_t>(kMaxChunkBytes))
    throw Error(ErrorCode::corrupt_frame, "nbytes exceeds 2^31 - 1");
  if (f.nbytes > 0 && f.block_size < 1)
    throw Error(ErrorCode::corrupt_frame, "block_size must be >= 1");
  return f;
}

void decompress_chunk_into(std::span<const std::uint8_t> frame, std::span<std::uint8_t> out,
                           int n_threads) {
  const FrameInfo f = parse_frame_header(frame);
  if (f.cbytes != frame.size())
    throw Error(ErrorCode::corrupt_frame, "cbytes does not match frame length");
  if (out.size() != f.nbytes)
    throw Error(ErrorCode::corrupt_frame, "frame nbytes does not match expected chunk size");
  if (f.nbytes == 0) {
    if (frame.size() != kFrameHeaderSize)
      throw Error(ErrorCode::corrupt_frame, "empty chunk with trailing payload");
    return;
  }
  const std::span<const std::uint8_t> body = frame.subspan(kFrameHeaderSize);

  if (f.stored_raw) {
    if (body.size() != f.nbytes)
      throw Error(ErrorCode::corrupt_frame, "stored_raw payload length mismatch");
    if (f.shuffled)
      unshuffle_into(f.typesize, body, out, n_threads);
    else
      std::memcpy(out.data(), body.data(), body.size());
    return;
  }

  const std::size_t nb = f.block_count();
  if (body.size() < 4 * nb) throw Error(ErrorCode::corrupt_frame, "block index truncated");
  std::vector<std::uint32_t> sizes(nb);
  std::vector<std::uint64_t> starts(nb);
  std::uint64_t pos = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    sizes[b] = detail::get_u32le(&body[4 * b]);
    starts[b] = pos;
    pos += sizes[b];
  }
  if (4 * nb + pos != body.size())
    throw Error(ErrorCode::corrupt_frame, "block index does not match payload length");
  const std::span<const std::uint8_t> payload = body.subspan(4 * nb);

  std::vector<std::uint8_t> shuffled_buf;
  std::span<std::uint8_t> target = out;
  if (f.shuffled) {
    shuffled_buf.resize(f.nbytes);
    target = shuffled_buf;
  }

  const std::uint32_t bs = f.block_size;
  parallel_blocks(static_cast<std::int64_t>(nb), n_threads, [&](std::size_t b) {
    const std::size_t off = b * static_cast<std::size_t>(bs);
    const std::size_t raw_len = std::min<std::size_t>(bs, f.nbytes - off);
    const auto stream = payload.subspan(starts[b], sizes[b]);
    auto dst = target.subspan(off, raw_len);
    if (sizes[b] == raw_len) {
      std::memcpy(dst.data(), stream.data(), raw_len);
    } else if (sizes[b] > raw_len) {
      throw Error(ErrorCode::corrupt_frame, "block larger than its uncompressed size");
    } else {
      lz_decompress_block_into(stream, dst);
    }
  });

  if (f.shuffled) unshuffle_into(f.typesize, shuffled_buf, out, n_threads);
}

std::vector<std::uint8_t> decompress_chunk(std::span<const std::uint8_t> frame, int n_threads) {
  const FrameInfo f = parse_frame_header(frame);
  std::vector<std::uint8_t> out(f.nbytes);
  decompress_chunk_into(frame, out, n_threads);
  return out;
}

}  // namespace blpk
