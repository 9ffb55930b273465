#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blpk/container.hpp"

// N-dimensional array adapter: the data buffer goes into the chunks, the
// descriptor goes into the metadata section as the canonical JSON document
//
//   {"container":"ndarray","shape":[...],"dtype":"...","order":"C"|"F"}
//
// with exactly that key order, so identical arrays produce identical files.

namespace blpk {

enum class Endianness { little, big, none };
enum class DtypeKind { int_, uint_, float_, bool_, bytes_ };
enum class Order { c, f };

struct Dtype {
  Endianness endianness = Endianness::little;
  DtypeKind kind = DtypeKind::float_;
  std::uint32_t itemsize = 8;

  bool operator==(const Dtype&) const = default;
};

// Descriptor grammar: optional '<' | '>' | '|', then a kind letter in
// {i,u,f,b,S}, then a decimal itemsize. '|' is only legal for one-byte kinds
// and S. Without a prefix, one-byte kinds and S normalize to '|', the rest
// to '<'. format_dtype(parse_dtype(s)) == s for every prefixed string.
Dtype parse_dtype(const std::string& s);
std::string format_dtype(const Dtype& d);

struct ArrayDescriptor {
  std::vector<std::uint64_t> shape;
  std::string dtype;
  Order order = Order::c;

  std::uint64_t element_count() const;  // product of extents; 1 for rank 0
  std::uint64_t buffer_bytes() const;

  bool operator==(const ArrayDescriptor&) const = default;
};

struct Array {
  ArrayDescriptor descriptor;
  std::vector<std::uint8_t> data;
};

/// Stores `data` (which must be laid out per descriptor.order) verbatim.
/// The shuffle typesize is set to the dtype itemsize, or 1 past 255.
FileInfo pack_array(const ArrayDescriptor& descriptor, std::span<const std::uint8_t> data,
                    std::ostream& sink, PackArgs args = PackArgs{});

/// Allocates the buffer once from the descriptor and decompresses every chunk
/// directly into it.
Array unpack_array(std::istream& source);

FileInfo pack_array_file(const ArrayDescriptor& descriptor, std::span<const std::uint8_t> data,
                         const std::filesystem::path& out, PackArgs args = PackArgs{});
Array unpack_array_file(const std::filesystem::path& in);

}  // namespace blpk
