#include "blpk/ref.hpp"

#include "blpk/error.hpp"

namespace blpk::ref {

std::vector<std::uint8_t> shuffle(unsigned typesize, std::span<const std::uint8_t> buf) {
  const std::size_t t = typesize;
  const std::size_t m = t ? buf.size() / t : 0;
  std::vector<std::uint8_t> out(buf.begin(), buf.end());
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t k = 0; k < m; ++k) out[i * m + k] = buf[k * t + i];
  return out;
}

std::vector<std::uint8_t> unshuffle(unsigned typesize, std::span<const std::uint8_t> buf) {
  const std::size_t t = typesize;
  const std::size_t m = t ? buf.size() / t : 0;
  std::vector<std::uint8_t> out(buf.begin(), buf.end());
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t k = 0; k < m; ++k) out[k * t + i] = buf[i * m + k];
  return out;
}

std::vector<std::uint8_t> lz_decompress_block(std::span<const std::uint8_t> stream,
                                              std::size_t expected_len) {
  std::vector<std::uint8_t> out;
  out.reserve(expected_len);
  std::size_t pos = 0;
  auto next = [&]() -> std::uint8_t {
    if (pos >= stream.size()) throw Error(ErrorCode::corrupt_block, "token stream truncated");
    return stream[pos++];
  };
  while (pos < stream.size()) {
    const std::uint8_t t = next();
    if (t < 32) {
      for (std::size_t i = 0; i <= t; ++i) out.push_back(next());
    } else {
      const std::size_t offset = ((static_cast<std::size_t>(t & 31) << 8) | next()) + 1;
      std::size_t len = static_cast<std::size_t>(t >> 5) + 2;
      if ((t >> 5) == 7) {
        std::uint8_t c;
        do {
          c = next();
          len += c;
        } while (c == 255);
      }
      if (offset > out.size())
        throw Error(ErrorCode::corrupt_block, "match offset before start of output");
      for (std::size_t i = 0; i < len; ++i) out.push_back(out[out.size() - offset]);
    }
    if (out.size() > expected_len) throw Error(ErrorCode::corrupt_block, "output overrun");
  }
  if (out.size() != expected_len) throw Error(ErrorCode::corrupt_block, "short output");
  return out;
}

}  // namespace blpk::ref
