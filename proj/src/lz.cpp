#include "blpk/lz.hpp"

#include <algorithm>
#include <cstring>

#include "blpk/error.hpp"

namespace blpk {

namespace {

constexpr std::size_t kMaxLiteralRun = 32;

inline std::uint32_t hash3(const std::uint8_t* p, unsigned bits) {
  const std::uint32_t v = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16);
  return (v * 2654435761u) >> (32 - bits);
}

// One match-finder table per worker thread; cleared on entry. Allocating it
// fresh per block costs more than the scan itself on incompressible data.
thread_local std::vector<std::uint32_t> t_htab;

}  // namespace

std::optional<std::vector<std::uint8_t>> lz_compress_block(int level,
                                                           std::span<const std::uint8_t> in) {
  if (level < 0 || level > 9) throw Error(ErrorCode::invalid_argument, "level must be in 0..9");
  const std::size_t n = in.size();
  if (level == 0 || n < 5) return std::nullopt;

  const unsigned bits = 12u + static_cast<unsigned>(std::min(level, 4));
  const std::size_t table_size = std::size_t{1} << bits;
  if (t_htab.size() < table_size)
    t_htab.assign(table_size, 0);
  else
    std::fill_n(t_htab.data(), table_size, 0);
  std::uint32_t* const htab = t_htab.data();  // stores position + 1

  const std::uint8_t* base = in.data();
  std::vector<std::uint8_t> out;
  out.reserve(n);

  std::size_t ip = 0;
  std::size_t anchor = 0;  // start of pending literals
  std::size_t misses = 0;  // drives the skip acceleration on stale data
  const std::size_t last_match_pos = n - kLzMinMatch;

  // Emits pending literals in runs of at most 32; false once the stream
  // stops being shorter than the input.
  auto flush_literals = [&](std::size_t from, std::size_t to) {
    while (from < to) {
      const std::size_t run = std::min(to - from, kMaxLiteralRun);
      out.push_back(static_cast<std::uint8_t>(run - 1));
      out.insert(out.end(), base + from, base + from + run);
      from += run;
      if (out.size() >= n) return false;
    }
    return true;
  };

  auto emit_match = [&](std::size_t len, std::size_t offset) {
    const auto off_bits = static_cast<std::uint32_t>(offset - 1);
    if (len <= 8) {
      out.push_back(static_cast<std::uint8_t>(((len - 2) << 5) | (off_bits >> 8)));
      out.push_back(static_cast<std::uint8_t>(off_bits & 0xff));
    } else {
      out.push_back(static_cast<std::uint8_t>((7u << 5) | (off_bits >> 8)));
      out.push_back(static_cast<std::uint8_t>(off_bits & 0xff));
      std::size_t rem = len - 9;
      while (rem >= 255) {
        out.push_back(255);
        rem -= 255;
      }
      out.push_back(static_cast<std::uint8_t>(rem));
    }
  };

  while (ip <= last_match_pos) {
    const std::uint32_t h = hash3(base + ip, bits);
    const std::uint32_t cand = htab[h];
    htab[h] = static_cast<std::uint32_t>(ip + 1);

    std::size_t match_len = 0;
    std::size_t offset = 0;
    if (cand != 0) {
      const std::size_t cpos = cand - 1;
      const std::size_t dist = ip - cpos;
      if (dist >= 1 && dist <= kLzWindow) {
        const std::size_t max_len = n - ip;
        std::size_t l = 0;
        while (l < max_len && base[cpos + l] == base[ip + l]) ++l;
        if (l >= kLzMinMatch) {
          match_len = l;
          offset = dist;
        }
      }
    }

    if (match_len) {
      if (!flush_literals(anchor, ip)) return std::nullopt;
      emit_match(match_len, offset);
      if (out.size() >= n) return std::nullopt;
      // Seed the start of the match region so periodic data re-syncs fast.
      const std::size_t end = ip + match_len;
      for (std::size_t s = ip + 1; s < std::min(ip + 3, end) && s <= last_match_pos; ++s)
        htab[hash3(base + s, bits)] = static_cast<std::uint32_t>(s + 1);
      ip = end;
      anchor = end;
      misses = 0;
    } else {
      ++misses;
      ip += 1 + (misses >> 5);
    }
  }

  // The final size is known here; skip the copy when it cannot win.
  const std::size_t tail = n - anchor;
  if (out.size() + tail + (tail + kMaxLiteralRun - 1) / kMaxLiteralRun >= n) return std::nullopt;
  if (!flush_literals(anchor, n)) return std::nullopt;
  return out;
}

void lz_decompress_block_into(std::span<const std::uint8_t> stream, std::span<std::uint8_t> out) {
  const std::uint8_t* ip = stream.data();
  const std::uint8_t* const ip_end = ip + stream.size();
  std::uint8_t* const op_base = out.data();
  std::size_t op = 0;
  const std::size_t out_len = out.size();

  while (ip < ip_end) {
    const std::uint8_t t = *ip++;
    if (t < 32) {
      const std::size_t run = static_cast<std::size_t>(t) + 1;
      if (static_cast<std::size_t>(ip_end - ip) < run)
        throw Error(ErrorCode::corrupt_block, "literal run truncated");
      if (out_len - op < run) throw Error(ErrorCode::corrupt_block, "literal run overruns output");
      std::memcpy(op_base + op, ip, run);
      ip += run;
      op += run;
    } else {
      if (ip >= ip_end) throw Error(ErrorCode::corrupt_block, "match token truncated");
      const std::size_t offset = ((static_cast<std::size_t>(t & 31) << 8) | *ip++) + 1;
      std::size_t len = static_cast<std::size_t>(t >> 5) + 2;
      if (len == 9) {  // L == 7: read length continuation
        len = 9;
        for (;;) {
          if (ip >= ip_end) throw Error(ErrorCode::corrupt_block, "length continuation truncated");
          const std::uint8_t c = *ip++;
          len += c;
          if (c != 255) break;
        }
      }
      if (offset > op) throw Error(ErrorCode::corrupt_block, "match offset before start of output");
      if (out_len - op < len) throw Error(ErrorCode::corrupt_block, "match overruns output");
      const std::uint8_t* src = op_base + op - offset;
      std::uint8_t* dst = op_base + op;
      for (std::size_t i = 0; i < len; ++i) dst[i] = src[i];  // overlap-safe
      op += len;
    }
  }
  if (op != out_len) throw Error(ErrorCode::corrupt_block, "stream ended before output was complete");
}

std::vector<std::uint8_t> lz_decompress_block(std::span<const std::uint8_t> stream,
                                              std::size_t expected_len) {
  std::vector<std::uint8_t> out(expected_len);
  lz_decompress_block_into(stream, out);
  return out;
}

}  // namespace blpk
