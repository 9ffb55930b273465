#include "blpk/shuffle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blpk/error.hpp"

namespace blpk {

namespace {

// Elements per transpose tile; keeps one tile of every byte plane in cache.
constexpr std::size_t kTileElements = 4096;
constexpr std::size_t kParallelThreshold = 1u << 17;

inline int resolve_threads(int n_threads) {
#ifdef _OPENMP
  return n_threads > 0 ? n_threads : omp_get_max_threads();
#else
  (void)n_threads;
  return 1;
#endif
}

template <unsigned W>
inline std::uint64_t load_element(const std::uint8_t* p) {
  if constexpr (W == 8) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return v;
  } else if constexpr (W == 4) {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
  } else {
    std::uint16_t v;
    std::memcpy(&v, p, 2);
    return v;
  }
}

template <unsigned W>
inline void store_element(std::uint8_t* p, std::uint64_t v) {
  if constexpr (W == 8) {
    std::memcpy(p, &v, 8);
  } else if constexpr (W == 4) {
    const auto t = static_cast<std::uint32_t>(v);
    std::memcpy(p, &t, 4);
  } else {
    const auto t = static_cast<std::uint16_t>(v);
    std::memcpy(p, &t, 2);
  }
}

inline std::uint64_t load64(const std::uint8_t* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return v;
}

inline void store64(std::uint8_t* p, std::uint64_t v) { std::memcpy(p, &v, 8); }

// Word-at-a-time kernels for the power-of-two element sizes: gather 8
// elements, compose one 8-byte output word per byte plane. Every element is
// loaded once and every plane word stored once, instead of one strided byte
// access per (element, plane) pair. Little-endian layout assumed for the
// in-register byte positions, which holds on every target this builds for.
template <unsigned W>  // W in {2, 4, 8}
void shuffle_words(std::size_t m, std::size_t k0, std::size_t k1, const std::uint8_t* in,
                   std::uint8_t* out) {
  std::size_t k = k0;
  for (; k + 8 <= k1; k += 8) {
    std::uint64_t e[8];
    for (unsigned j = 0; j < 8; ++j) e[j] = load_element<W>(in + (k + j) * W);
    for (unsigned i = 0; i < W; ++i) {
      std::uint64_t word = 0;
      for (unsigned j = 0; j < 8; ++j) word |= ((e[j] >> (8 * i)) & 0xff) << (8 * j);
      store64(out + i * m + k, word);
    }
  }
  for (; k < k1; ++k)
    for (unsigned i = 0; i < W; ++i) out[i * m + k] = in[k * W + i];
}

template <unsigned W>
void unshuffle_words(std::size_t m, std::size_t k0, std::size_t k1, const std::uint8_t* in,
                     std::uint8_t* out) {
  std::size_t k = k0;
  for (; k + 8 <= k1; k += 8) {
    std::uint64_t plane[W];
    for (unsigned i = 0; i < W; ++i) plane[i] = load64(in + i * m + k);
    for (unsigned j = 0; j < 8; ++j) {
      std::uint64_t e = 0;
      for (unsigned i = 0; i < W; ++i) e |= ((plane[i] >> (8 * j)) & 0xff) << (8 * i);
      store_element<W>(out + (k + j) * W, e);
    }
  }
  for (; k < k1; ++k)
    for (unsigned i = 0; i < W; ++i) out[k * W + i] = in[i * m + k];
}

}  // namespace

void shuffle_into(unsigned typesize, std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                  int n_threads) {
  if (typesize < 1) throw Error(ErrorCode::invalid_argument, "typesize must be >= 1");
  if (out.size() != in.size()) throw Error(ErrorCode::invalid_argument, "output size mismatch");
  if (in.empty()) return;
  const std::size_t t = typesize;
  const std::size_t m = in.size() / t;
  if (t == 1 || m == 0) {
    std::memcpy(out.data(), in.data(), in.size());
    return;
  }
  const std::size_t body = m * t;
  const auto n_tiles = static_cast<std::int64_t>((m + kTileElements - 1) / kTileElements);
  const int nt = resolve_threads(n_threads);
  (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) if (in.size() >= kParallelThreshold && nt > 1)
#endif
  for (std::int64_t tile = 0; tile < n_tiles; ++tile) {
    const std::size_t k0 = static_cast<std::size_t>(tile) * kTileElements;
    const std::size_t k1 = std::min(k0 + kTileElements, m);
    constexpr bool le = std::endian::native == std::endian::little;
    if (le && t == 8) {
      shuffle_words<8>(m, k0, k1, in.data(), out.data());
    } else if (le && t == 4) {
      shuffle_words<4>(m, k0, k1, in.data(), out.data());
    } else if (le && t == 2) {
      shuffle_words<2>(m, k0, k1, in.data(), out.data());
    } else {
      for (std::size_t i = 0; i < t; ++i) {
        std::uint8_t* dst = out.data() + i * m;
        const std::uint8_t* src = in.data() + i;
        for (std::size_t k = k0; k < k1; ++k) dst[k] = src[k * t];
      }
    }
  }
  if (body < in.size()) std::memcpy(out.data() + body, in.data() + body, in.size() - body);
}

void unshuffle_into(unsigned typesize, std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
                    int n_threads) {
  if (typesize < 1) throw Error(ErrorCode::invalid_argument, "typesize must be >= 1");
  if (out.size() != in.size()) throw Error(ErrorCode::invalid_argument, "output size mismatch");
  if (in.empty()) return;
  const std::size_t t = typesize;
  const std::size_t m = in.size() / t;
  if (t == 1 || m == 0) {
    std::memcpy(out.data(), in.data(), in.size());
    return;
  }
  const std::size_t body = m * t;
  const auto n_tiles = static_cast<std::int64_t>((m + kTileElements - 1) / kTileElements);
  const int nt = resolve_threads(n_threads);
  (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt) if (in.size() >= kParallelThreshold && nt > 1)
#endif
  for (std::int64_t tile = 0; tile < n_tiles; ++tile) {
    const std::size_t k0 = static_cast<std::size_t>(tile) * kTileElements;
    const std::size_t k1 = std::min(k0 + kTileElements, m);
    constexpr bool le = std::endian::native == std::endian::little;
    if (le && t == 8) {
      unshuffle_words<8>(m, k0, k1, in.data(), out.data());
    } else if (le && t == 4) {
      unshuffle_words<4>(m, k0, k1, in.data(), out.data());
    } else if (le && t == 2) {
      unshuffle_words<2>(m, k0, k1, in.data(), out.data());
    } else {
      for (std::size_t i = 0; i < t; ++i) {
        const std::uint8_t* src = in.data() + i * m;
        std::uint8_t* dst = out.data() + i;
        for (std::size_t k = k0; k < k1; ++k) dst[k * t] = src[k];
      }
    }
  }
  if (body < in.size()) std::memcpy(out.data() + body, in.data() + body, in.size() - body);
}

std::vector<std::uint8_t> shuffle(unsigned typesize, std::span<const std::uint8_t> buf, int n_threads) {
  std::vector<std::uint8_t> out(buf.size());
  shuffle_into(typesize, buf, out, n_threads);
  return out;
}

std::vector<std::uint8_t> unshuffle(unsigned typesize, std::span<const std::uint8_t> buf, int n_threads) {
  std::vector<std::uint8_t> out(buf.size());
  unshuffle_into(typesize, buf, out, n_threads);
  return out;
}

}  // namespace blpk
