#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <streambuf>

// Read-only istream over an existing buffer, so in-memory data can go through
// the stream-based container API without being copied.

namespace blpk::detail {

class MemBuf : public std::streambuf {
 public:
  explicit MemBuf(std::span<const std::uint8_t> data) {
    auto* p = const_cast<char*>(reinterpret_cast<const char*>(data.data()));
    setg(p, p, p + data.size());
  }

 protected:
  pos_type seekoff(off_type off, std::ios_base::seekdir dir, std::ios_base::openmode which) override {
    if (!(which & std::ios_base::in)) return pos_type(off_type(-1));
    char* base = eback();
    off_type target;
    switch (dir) {
      case std::ios_base::beg:
        target = off;
        break;
      case std::ios_base::cur:
        target = (gptr() - base) + off;
        break;
      case std::ios_base::end:
        target = (egptr() - base) + off;
        break;
      default:
        return pos_type(off_type(-1));
    }
    if (target < 0 || target > egptr() - base) return pos_type(off_type(-1));
    setg(base, base + target, egptr());
    return pos_type(target);
  }

  pos_type seekpos(pos_type pos, std::ios_base::openmode which) override {
    return seekoff(off_type(pos), std::ios_base::beg, which);
  }
};

class imemstream : private MemBuf, public std::istream {
 public:
  explicit imemstream(std::span<const std::uint8_t> data)
      : MemBuf(data), std::istream(static_cast<std::streambuf*>(this)) {}
};

}  // namespace blpk::detail
