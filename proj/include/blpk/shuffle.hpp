#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Byte transposition over the prefix of floor(len/typesize) whole elements:
//
//   out[i*m + k] = in[k*typesize + i]   for i < typesize, k < m
//
// with m = len / typesize. The trailing remainder (len % typesize bytes) is
// copied verbatim. typesize 1 is the identity.

namespace blpk {

/// n_threads 0 picks the OpenMP default.
void shuffle_into(unsigned typesize, std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                  int n_threads = 0);
void unshuffle_into(unsigned typesize, std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                    int n_threads = 0);

std::vector<std::uint8_t> shuffle(unsigned typesize, std::span<const std::uint8_t> buf,
                                  int n_threads = 0);
std::vector<std::uint8_t> unshuffle(unsigned typesize, std::span<const std::uint8_t> buf,
                                    int n_threads = 0);

}  // namespace blpk
