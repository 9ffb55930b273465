#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Plain serial reference implementations of the kernels. These stay
// deliberately naive: tests check the OpenMP kernels against them, and
// blpk-kernel-bench compares their throughput.

namespace blpk::ref {

std::vector<std::uint8_t> shuffle(unsigned typesize, std::span<const std::uint8_t> buf);
std::vector<std::uint8_t> unshuffle(unsigned typesize, std::span<const std::uint8_t> buf);

/// Independent token-stream interpreter for the LZ block grammar.
std::vector<std::uint8_t> lz_decompress_block(std::span<const std::uint8_t> stream,
                                              std::size_t expected_len);

}  // namespace blpk::ref
