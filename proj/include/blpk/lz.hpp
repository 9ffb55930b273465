#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

// Byte-oriented LZ77 block codec. Token stream, normative and bit-exact:
//
//   control byte t < 32   literal run: the next t+1 bytes are literals
//   control byte t >= 32  match: L = t >> 5 in 1..7
//                           offset = (((t & 31) << 8) | next byte) + 1
//                           length = L + 2, except L == 7 where length
//                           continuation bytes follow the offset byte;
//                           each adds its value, a byte of 255 continues,
//                           so length = 9 + sum(continuation bytes)
//
// Matches copy `length` bytes from `offset` back in the decoded output;
// overlapping copies are legal. Window is 8192 bytes.

namespace blpk {

inline constexpr std::size_t kLzWindow = 8192;
inline constexpr std::size_t kLzMinMatch = 3;

/// Greedy single-probe encoder over a hash table of 2^(12 + min(level, 4))
/// slots. Returns nullopt when the token stream would not be shorter than
/// the input (Incompressible) and for level 0, which disables compression.
std::optional<std::vector<std::uint8_t>> lz_compress_block(int level,
                                                           std::span<const std::uint8_t> block);

/// Decodes exactly `out.size()` bytes; throws CorruptBlock on malformed input.
void lz_decompress_block_into(std::span<const std::uint8_t> stream, std::span<std::uint8_t> out);

std::vector<std::uint8_t> lz_decompress_block(std::span<const std::uint8_t> stream,
                                              std::size_t expected_len);

}  // namespace blpk
