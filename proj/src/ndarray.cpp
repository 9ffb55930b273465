#include "blpk/ndarray.hpp"

#include <charconv>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "blpk/detail/memstream.hpp"
#include "blpk/error.hpp"
#include "internal.hpp"

namespace blpk {

namespace {

constexpr const char* kContainerTag = "ndarray";

bool itemsize_ok(DtypeKind kind, std::uint64_t itemsize) {
  switch (kind) {
    case DtypeKind::int_:
    case DtypeKind::uint_:
      return itemsize == 1 || itemsize == 2 || itemsize == 4 || itemsize == 8;
    case DtypeKind::float_:
      return itemsize == 2 || itemsize == 4 || itemsize == 8;
    case DtypeKind::bool_:
      return itemsize == 1;
    case DtypeKind::bytes_:
      return itemsize >= 1 && itemsize <= 0x7fffffff;
  }
  return false;
}

char kind_char(DtypeKind kind) {
  switch (kind) {
    case DtypeKind::int_:
      return 'i';
    case DtypeKind::uint_:
      return 'u';
    case DtypeKind::float_:
      return 'f';
    case DtypeKind::bool_:
      return 'b';
    case DtypeKind::bytes_:
      return 'S';
  }
  return '?';
}

}  // namespace

Dtype parse_dtype(const std::string& s) {
  std::size_t pos = 0;
  bool explicit_prefix = false;
  Endianness endianness = Endianness::little;
  if (!s.empty() && (s[0] == '<' || s[0] == '>' || s[0] == '|')) {
    explicit_prefix = true;
    endianness = s[0] == '<' ? Endianness::little
                             : (s[0] == '>' ? Endianness::big : Endianness::none);
    pos = 1;
  }
  if (pos >= s.size()) throw Error(ErrorCode::invalid_dtype, "'" + s + "': missing kind");
  DtypeKind kind;
  switch (s[pos]) {
    case 'i':
      kind = DtypeKind::int_;
      break;
    case 'u':
      kind = DtypeKind::uint_;
      break;
    case 'f':
      kind = DtypeKind::float_;
      break;
    case 'b':
      kind = DtypeKind::bool_;
      break;
    case 'S':
      kind = DtypeKind::bytes_;
      break;
    default:
      throw Error(ErrorCode::invalid_dtype, "'" + s + "': unknown kind '" + std::string(1, s[pos]) + "'");
  }
  ++pos;
  if (pos >= s.size()) throw Error(ErrorCode::invalid_dtype, "'" + s + "': missing itemsize");
  std::uint64_t itemsize = 0;
  const auto [end, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), itemsize);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw Error(ErrorCode::invalid_dtype, "'" + s + "': bad itemsize");
  if (!itemsize_ok(kind, itemsize))
    throw Error(ErrorCode::invalid_dtype, "'" + s + "': unsupported itemsize");

  const bool byte_orderless = itemsize == 1 || kind == DtypeKind::bytes_;
  if (!explicit_prefix) endianness = byte_orderless ? Endianness::none : Endianness::little;
  if (endianness == Endianness::none && !byte_orderless)
    throw Error(ErrorCode::invalid_dtype, "'" + s + "': '|' needs a one-byte kind or S");

  return Dtype{endianness, kind, static_cast<std::uint32_t>(itemsize)};
}

std::string format_dtype(const Dtype& d) {
  if (!itemsize_ok(d.kind, d.itemsize))
    throw Error(ErrorCode::invalid_dtype, "unsupported itemsize");
  const bool byte_orderless = d.itemsize == 1 || d.kind == DtypeKind::bytes_;
  if (d.endianness == Endianness::none && !byte_orderless)
    throw Error(ErrorCode::invalid_dtype, "'|' needs a one-byte kind or S");
  std::string s;
  s += d.endianness == Endianness::little ? '<' : (d.endianness == Endianness::big ? '>' : '|');
  s += kind_char(d.kind);
  s += std::to_string(d.itemsize);
  return s;
}

std::uint64_t ArrayDescriptor::element_count() const {
  std::uint64_t count = 1;
  for (std::uint64_t extent : shape) {
    if (extent != 0 && count > std::numeric_limits<std::uint64_t>::max() / extent)
      throw Error(ErrorCode::descriptor_mismatch, "shape overflows element count");
    count *= extent;
  }
  return count;
}

std::uint64_t ArrayDescriptor::buffer_bytes() const {
  const Dtype d = parse_dtype(dtype);
  const std::uint64_t count = element_count();
  if (count > std::numeric_limits<std::uint64_t>::max() / d.itemsize)
    throw Error(ErrorCode::descriptor_mismatch, "buffer size overflows");
  return count * d.itemsize;
}

namespace {

std::string canonical_metadata(const ArrayDescriptor& desc) {
  nlohmann::ordered_json doc;
  doc["container"] = kContainerTag;
  doc["shape"] = desc.shape;
  doc["dtype"] = desc.dtype;
  doc["order"] = desc.order == Order::c ? "C" : "F";
  return doc.dump();
}

ArrayDescriptor descriptor_from_metadata(const std::string& payload) {
  ArrayDescriptor desc;
  try {
    const auto doc = nlohmann::json::parse(payload);
    if (!doc.is_object() || doc.value("container", "") != kContainerTag)
      throw Error(ErrorCode::not_an_array_file, "metadata lacks the ndarray container tag");
    if (!doc.contains("shape") || !doc["shape"].is_array() || !doc.contains("dtype") ||
        !doc.contains("order"))
      throw Error(ErrorCode::not_an_array_file, "metadata misses shape/dtype/order");
    for (const auto& extent : doc["shape"]) {
      if (!extent.is_number_unsigned())
        throw Error(ErrorCode::not_an_array_file, "shape extents must be non-negative integers");
      desc.shape.push_back(extent.get<std::uint64_t>());
    }
    desc.dtype = doc["dtype"].get<std::string>();
    const std::string order = doc["order"].get<std::string>();
    if (order == "C")
      desc.order = Order::c;
    else if (order == "F")
      desc.order = Order::f;
    else
      throw Error(ErrorCode::not_an_array_file, "order must be C or F");
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::not_an_array_file, "metadata is not an ndarray document");
  }
  parse_dtype(desc.dtype);  // validates
  return desc;
}

}  // namespace

FileInfo pack_array(const ArrayDescriptor& descriptor, std::span<const std::uint8_t> data,
                    std::ostream& sink, PackArgs args) {
  const Dtype d = parse_dtype(descriptor.dtype);
  const std::uint64_t expected = descriptor.buffer_bytes();
  if (data.size() != expected)
    throw Error(ErrorCode::descriptor_mismatch,
                "descriptor wants " + std::to_string(expected) + " bytes, buffer has " +
                    std::to_string(data.size()));
  args.codec.typesize = d.itemsize <= 255 ? d.itemsize : 1;
  args.metadata = canonical_metadata(descriptor);
  detail::imemstream src(data);
  return pack(src, data.size(), sink, args);
}

Array unpack_array(std::istream& source) {
  const FileHeader h = detail::read_header(source);
  if (!h.metadata_present())
    throw Error(ErrorCode::not_an_array_file, "file carries no metadata section");
  const MetadataSection meta = detail::read_metadata_section(source);
  Array array;
  array.descriptor = descriptor_from_metadata(meta.payload);
  const std::uint64_t expected = array.descriptor.buffer_bytes();
  if (static_cast<std::uint64_t>(h.data_bytes()) != expected)
    throw Error(ErrorCode::descriptor_mismatch,
                "descriptor wants " + std::to_string(expected) + " bytes, file stores " +
                    std::to_string(h.data_bytes()));

  if (h.offsets_present()) {
    if (h.total_slots() > std::numeric_limits<std::int64_t>::max() / 8)
      throw Error(ErrorCode::invalid_header, "offsets section implausibly large");
    const std::streamsize skip = static_cast<std::streamsize>(h.total_slots()) * 8;
    source.ignore(skip);
    if (source.gcount() != skip) throw Error(ErrorCode::io_error, "unexpected end of stream");
  }

  array.data.resize(expected);
  std::span<std::uint8_t> out(array.data);
  detail::walk_chunks(source, h, [&](std::int64_t i, std::span<const std::uint8_t> frame) {
    const std::uint64_t offset = static_cast<std::uint64_t>(i) * h.chunk_size;
    const std::uint64_t want =
        i + 1 < h.nchunks ? static_cast<std::uint64_t>(h.chunk_size)
                          : static_cast<std::uint64_t>(h.last_chunk);
    decompress_chunk_into(frame, out.subspan(offset, want));
  });
  return array;
}

FileInfo pack_array_file(const ArrayDescriptor& descriptor, std::span<const std::uint8_t> data,
                         const std::filesystem::path& out, PackArgs args) {
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + out.string() + "' for writing");
  return pack_array(descriptor, data, os, std::move(args));
}

Array unpack_array_file(const std::filesystem::path& in) {
  std::ifstream is(in, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open '" + in.string() + "' for reading");
  return unpack_array(is);
}

}  // namespace blpk
