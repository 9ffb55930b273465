#include "blpk/container.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "blpk/detail/bytes.hpp"
#include "blpk/error.hpp"
#include "internal.hpp"

namespace blpk {

namespace detail {

FileHeader read_header(std::istream& is) {
  std::uint8_t buf[kHeaderSize];
  read_exact(is, buf, sizeof buf);
  return decode_header(buf);
}

MetadataSection read_metadata_section(std::istream& is) {
  std::vector<std::uint8_t> buf(kMetadataLocalHeaderSize);
  read_exact(is, buf.data(), buf.size());
  const std::uint32_t alloc = get_u32le(&buf[4]);
  if (!checksum_valid_id(buf[8])) throw Error(ErrorCode::invalid_metadata, "unknown checksum id");
  const std::size_t rest = static_cast<std::size_t>(alloc) + checksum_size(static_cast<Checksum>(buf[8]));
  buf.resize(kMetadataLocalHeaderSize + rest);
  read_exact(is, buf.data() + kMetadataLocalHeaderSize, rest);
  return decode_metadata_section(buf);
}

void walk_chunks(std::istream& is, const FileHeader& h,
                 const std::function<void(std::int64_t, std::span<const std::uint8_t>)>& fn) {
  const std::size_t cksum_len = checksum_size(h.checksum);
  // The frame grammar caps a chunk at header + index (4 bytes per block,
  // blocks of at least 1 byte) + payload; anything above is a lying header.
  const std::uint64_t max_cbytes =
      kFrameHeaderSize + 5ull * static_cast<std::uint64_t>(h.chunk_size);
  std::vector<std::uint8_t> frame;
  std::vector<std::uint8_t> stored(cksum_len);
  for (std::int64_t i = 0; i < h.nchunks; ++i) {
    frame.resize(kFrameHeaderSize);
    read_exact(is, frame.data(), kFrameHeaderSize);
    const std::uint32_t cbytes = get_u32le(&frame[12]);
    if (cbytes < kFrameHeaderSize || cbytes > max_cbytes)
      throw Error(ErrorCode::corrupt_frame, "frame length out of range");
    frame.resize(cbytes);
    read_exact(is, frame.data() + kFrameHeaderSize, cbytes - kFrameHeaderSize);
    if (cksum_len) {
      read_exact(is, stored.data(), cksum_len);
      const auto computed = compute_checksum(h.checksum, frame);
      if (std::memcmp(computed.data(), stored.data(), cksum_len) != 0)
        throw Error(ErrorCode::checksum_mismatch,
                    "chunk " + std::to_string(i) + " failed its checksum", i);
    }
    fn(i, frame);
  }
}

}  // namespace detail

namespace {

struct Layout {
  std::int64_t nchunks = 1;
  std::int32_t last_chunk = 0;
};

Layout chunk_layout(std::uint64_t src_size, std::int32_t chunk_size) {
  Layout l;
  const auto cs = static_cast<std::uint64_t>(chunk_size);
  if (src_size == 0) return l;  // one empty chunk
  const std::uint64_t n = (src_size + cs - 1) / cs;
  if (n > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    throw Error(ErrorCode::invalid_argument, "source needs more than 2^63 - 1 chunks");
  l.nchunks = static_cast<std::int64_t>(n);
  l.last_chunk = static_cast<std::int32_t>(src_size - (n - 1) * cs);
  return l;
}

std::int64_t default_app_chunks(std::int64_t nchunks) {
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max() - nchunks;
  if (nchunks > cap / 10) return cap;
  return 10 * nchunks;
}

void write_chunk_with_checksum(std::ostream& sink, std::span<const std::uint8_t> frame,
                               Checksum id) {
  detail::write_exact(sink, frame.data(), frame.size());
  if (id != Checksum::none) {
    const auto digest = compute_checksum(id, frame);
    detail::write_exact(sink, digest.data(), digest.size());
  }
}

double safe_ratio(std::uint64_t data_bytes, std::uint64_t file_bytes) {
  return file_bytes ? static_cast<double>(data_bytes) / static_cast<double>(file_bytes) : 0.0;
}

}  // namespace

FileInfo pack(std::istream& source, std::uint64_t src_size, std::ostream& sink,
              const PackArgs& args) {
  validate_codec_params(args.codec);
  if (args.chunk_size < 1) throw Error(ErrorCode::invalid_argument, "chunk_size must be positive");
  if (!checksum_valid_id(static_cast<std::uint8_t>(args.checksum)))
    throw Error(ErrorCode::invalid_argument, "unknown checksum id");

  const Layout layout = chunk_layout(src_size, args.chunk_size);

  FileHeader h;
  h.checksum = args.checksum;
  h.typesize = static_cast<std::uint8_t>(args.codec.typesize);
  h.chunk_size = args.chunk_size;
  h.last_chunk = layout.last_chunk;
  h.nchunks = layout.nchunks;
  if (args.offsets_enabled) {
    h.options |= kOptionOffsets;
    h.max_app_chunks = args.max_app_chunks >= 0
                           ? std::min(args.max_app_chunks,
                                      std::numeric_limits<std::int64_t>::max() - h.nchunks)
                           : default_app_chunks(h.nchunks);
  }
  if (args.metadata) h.options |= kOptionMetadata;

  if (args.offsets_enabled && sink.tellp() == std::ostream::pos_type(-1))
    throw Error(ErrorCode::sink_not_seekable, "offsets need a seekable sink for back-patching");

  FileInfo result;
  std::uint64_t written = 0;
  const auto header_bytes = encode_header(h);
  detail::write_exact(sink, header_bytes.data(), header_bytes.size());
  written += header_bytes.size();

  if (args.metadata) {
    MetadataSection m;
    m.payload = *args.metadata;
    if (m.payload.size() > std::numeric_limits<std::uint32_t>::max())
      throw Error(ErrorCode::invalid_metadata, "payload too large");
    const auto used = static_cast<std::uint32_t>(m.payload.size());
    if (args.metadata_alloc) {
      if (*args.metadata_alloc < used)
        throw Error(ErrorCode::invalid_metadata, "metadata_alloc below payload size");
      m.alloc_size = *args.metadata_alloc;
    } else {
      const std::uint64_t alloc = 10ull * used;
      m.alloc_size = static_cast<std::uint32_t>(
          std::min<std::uint64_t>(alloc, std::numeric_limits<std::uint32_t>::max()));
    }
    m.checksum = args.checksum;
    const auto bytes = encode_metadata_section(m);
    detail::write_exact(sink, bytes.data(), bytes.size());
    written += bytes.size();
    result.metadata = m.payload;
  }

  std::uint64_t offsets_pos = 0;
  OffsetsTable offsets;
  if (args.offsets_enabled) {
    offsets.entries.assign(static_cast<std::size_t>(h.total_slots()), kUnusedOffset);
    offsets_pos = written;
    const auto bytes = encode_offsets(offsets);
    detail::write_exact(sink, bytes.data(), bytes.size());
    written += bytes.size();
  }

  const std::size_t cksum_len = checksum_size(args.checksum);
  std::vector<std::uint8_t> plain;
  for (std::int64_t i = 0; i < h.nchunks; ++i) {
    const std::uint64_t want =
        i + 1 < h.nchunks ? static_cast<std::uint64_t>(h.chunk_size)
                          : static_cast<std::uint64_t>(h.last_chunk);
    plain.resize(want);
    if (want) detail::read_exact(source, plain.data(), want);
    if (args.offsets_enabled)
      offsets.entries[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(written);
    const auto frame = compress_chunk(args.codec, plain);
    write_chunk_with_checksum(sink, frame, args.checksum);
    written += frame.size() + cksum_len;
    result.chunk_cbytes.push_back(static_cast<std::uint32_t>(frame.size()));
  }

  if (args.offsets_enabled) {
    sink.seekp(static_cast<std::streamoff>(offsets_pos));
    if (!sink) throw Error(ErrorCode::sink_not_seekable, "seek to offsets section failed");
    const auto bytes = encode_offsets(offsets);
    detail::write_exact(sink, bytes.data(), bytes.size());
    sink.seekp(static_cast<std::streamoff>(written));
    if (!sink) throw Error(ErrorCode::sink_not_seekable, "seek past offsets section failed");
    result.offsets = offsets.entries;
  }
  sink.flush();
  if (!sink) throw Error(ErrorCode::io_error, "flush failed");

  result.header = h;
  result.file_bytes = written;
  result.data_bytes = src_size;
  result.ratio = safe_ratio(src_size, result.file_bytes);
  return result;
}

namespace {

void check_offsets_plausible(const FileHeader& h) {
  if (h.total_slots() > std::numeric_limits<std::int64_t>::max() / 8)
    throw Error(ErrorCode::invalid_header, "offsets section implausibly large");
}

}  // namespace

UnpackResult unpack(std::istream& source, std::ostream& sink) {
  const FileHeader h = detail::read_header(source);
  UnpackResult result;
  if (h.metadata_present()) result.metadata = detail::read_metadata_section(source).payload;
  if (h.offsets_present()) {
    check_offsets_plausible(h);
    const std::streamsize skip = static_cast<std::streamsize>(h.total_slots()) * 8;
    source.ignore(skip);
    if (source.gcount() != skip) throw Error(ErrorCode::io_error, "unexpected end of stream");
  }

  std::vector<std::uint8_t> plain;
  detail::walk_chunks(source, h, [&](std::int64_t i, std::span<const std::uint8_t> frame) {
    const std::uint64_t want =
        i + 1 < h.nchunks ? static_cast<std::uint64_t>(h.chunk_size)
                          : static_cast<std::uint64_t>(h.last_chunk);
    plain.resize(want);
    decompress_chunk_into(frame, plain);
    if (want) detail::write_exact(sink, plain.data(), plain.size());
    result.nbytes += want;
  });
  sink.flush();
  if (!sink) throw Error(ErrorCode::io_error, "flush failed");
  return result;
}

std::int64_t append(std::iostream& file, std::istream& source, std::uint64_t src_size,
                    const CodecParams& codec) {
  file.seekg(0);
  if (!file) throw Error(ErrorCode::io_error, "seek failed");
  const FileHeader h = detail::read_header(file);
  if (!h.offsets_present())
    throw Error(ErrorCode::no_offsets, "file was written without an offsets section");
  check_offsets_plausible(h);
  if (src_size == 0) return h.nchunks;
  if (h.last_chunk != h.chunk_size)
    throw Error(ErrorCode::append_to_partial_chunk, "existing final chunk is not full");

  const Layout add = chunk_layout(src_size, h.chunk_size);
  if (add.nchunks > h.max_app_chunks)
    throw Error(ErrorCode::no_append_space,
                "need " + std::to_string(add.nchunks) + " slots, have " +
                    std::to_string(h.max_app_chunks));

  std::streamoff offsets_pos = kHeaderSize;
  if (h.metadata_present()) {
    file.seekg(kHeaderSize);
    const MetadataSection m = detail::read_metadata_section(file);
    offsets_pos += static_cast<std::streamoff>(metadata_section_size(m));
  }

  CodecParams params = codec;
  params.typesize = h.typesize;
  validate_codec_params(params);

  file.seekp(0, std::ios_base::end);
  if (!file) throw Error(ErrorCode::io_error, "seek to end failed");

  std::vector<std::int64_t> new_offsets;
  std::vector<std::uint8_t> plain;
  for (std::int64_t i = 0; i < add.nchunks; ++i) {
    const std::uint64_t want =
        i + 1 < add.nchunks ? static_cast<std::uint64_t>(h.chunk_size)
                            : static_cast<std::uint64_t>(add.last_chunk);
    plain.resize(want);
    detail::read_exact(source, plain.data(), want);
    new_offsets.push_back(static_cast<std::int64_t>(file.tellp()));
    const auto frame = compress_chunk(params, plain);
    write_chunk_with_checksum(file, frame, h.checksum);
  }

  file.seekp(offsets_pos + 8 * h.nchunks);
  if (!file) throw Error(ErrorCode::io_error, "seek to offset slots failed");
  std::vector<std::uint8_t> slot(8);
  for (std::int64_t off : new_offsets) {
    detail::put_i64le(slot.data(), off);
    detail::write_exact(file, slot.data(), slot.size());
  }

  FileHeader updated = h;
  updated.nchunks += add.nchunks;
  updated.max_app_chunks -= add.nchunks;
  updated.last_chunk = add.last_chunk;
  const auto header_bytes = encode_header(updated);
  file.seekp(0);
  if (!file) throw Error(ErrorCode::io_error, "seek to header failed");
  detail::write_exact(file, header_bytes.data(), header_bytes.size());
  file.flush();
  if (!file) throw Error(ErrorCode::io_error, "flush failed");
  return updated.nchunks;
}

FileInfo info(std::istream& source) {
  FileInfo result;
  const FileHeader h = detail::read_header(source);
  result.header = h;
  std::uint64_t consumed = kHeaderSize;

  if (h.metadata_present()) {
    const MetadataSection m = detail::read_metadata_section(source);
    result.metadata = m.payload;
    consumed += metadata_section_size(m);
  }
  if (h.offsets_present()) {
    check_offsets_plausible(h);
    const std::size_t n_slots = static_cast<std::size_t>(h.total_slots());
    std::vector<std::uint8_t> buf(n_slots * 8);
    detail::read_exact(source, buf.data(), buf.size());
    result.offsets = decode_offsets(buf, n_slots).entries;
    consumed += buf.size();
  }

  const std::size_t cksum_len = checksum_size(h.checksum);
  std::uint8_t frame_header[kFrameHeaderSize];
  for (std::int64_t i = 0; i < h.nchunks; ++i) {
    detail::read_exact(source, frame_header, kFrameHeaderSize);
    const std::uint32_t cbytes = detail::get_u32le(&frame_header[12]);
    if (cbytes < kFrameHeaderSize)
      throw Error(ErrorCode::corrupt_frame, "frame shorter than its header");
    const std::streamsize skip =
        static_cast<std::streamsize>(cbytes - kFrameHeaderSize) + static_cast<std::streamsize>(cksum_len);
    source.ignore(skip);
    if (source.gcount() != skip) throw Error(ErrorCode::io_error, "unexpected end of stream");
    result.chunk_cbytes.push_back(cbytes);
    consumed += static_cast<std::uint64_t>(cbytes) + cksum_len;
  }

  result.file_bytes = consumed;
  result.data_bytes = static_cast<std::uint64_t>(h.data_bytes());
  result.ratio = safe_ratio(result.data_bytes, result.file_bytes);
  return result;
}

namespace {

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "' for reading");
  return is;
}

std::uint64_t file_size_of(const std::filesystem::path& p) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(p, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot stat '" + p.string() + "': " + ec.message());
  return size;
}

}  // namespace

FileInfo pack_file(const std::filesystem::path& in, const std::filesystem::path& out,
                   const PackArgs& args) {
  auto is = open_input(in);
  const std::uint64_t size = file_size_of(in);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + out.string() + "' for writing");
  return pack(is, size, os, args);
}

UnpackResult unpack_file(const std::filesystem::path& in, const std::filesystem::path& out) {
  auto is = open_input(in);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + out.string() + "' for writing");
  return unpack(is, os);
}

std::int64_t append_file(const std::filesystem::path& file, const std::filesystem::path& in,
                         const CodecParams& codec) {
  std::fstream fs(file, std::ios::binary | std::ios::in | std::ios::out);
  if (!fs) throw Error(ErrorCode::io_error, "cannot open '" + file.string() + "' for update");
  auto is = open_input(in);
  return append(fs, is, file_size_of(in), codec);
}

FileInfo info_file(const std::filesystem::path& in) {
  auto is = open_input(in);
  return info(is);
}

}  // namespace blpk
