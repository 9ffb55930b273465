#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <new>

#include "blpk/container.hpp"
#include "support.hpp"

// Counting allocator: pack/unpack must stay within a small multiple of the
// chunk size no matter how large the file is.

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};

void note_alloc(std::size_t n) {
  const std::size_t live = g_live.fetch_add(n) + n;
  std::size_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
}

void note_free(std::size_t n) { g_live.fetch_sub(n); }

void reset_peak() { g_peak.store(g_live.load()); }

}  // namespace

void* operator new(std::size_t n) {
  auto* p = static_cast<std::size_t*>(std::malloc(n + sizeof(std::size_t)));
  if (!p) throw std::bad_alloc();
  *p = n;
  note_alloc(n);
  return p + 1;
}

void operator delete(void* p) noexcept {
  if (!p) return;
  auto* base = static_cast<std::size_t*>(p) - 1;
  note_free(*base);
  std::free(base);
}

void operator delete(void* p, std::size_t) noexcept { operator delete(p); }

TEST_CASE("pack and unpack stay within a few chunk sizes of memory") {
  constexpr std::size_t kChunk = 256 * 1024;
  constexpr std::size_t kTotal = 10 * kChunk;
  testsupport::TempDir dir("blpk-mem");

  const auto data = testsupport::mixed_bytes(kTotal, 31);
  testsupport::write_file_bytes(dir / "input", data);

  blpk::PackArgs args;
  args.chunk_size = kChunk;
  args.checksum = blpk::Checksum::crc32;
  args.codec.n_threads = 2;

  {
    std::ifstream src(dir / "input", std::ios::binary);
    std::ofstream sink(dir / "packed", std::ios::binary);
    reset_peak();
    const std::size_t before = g_live.load();
    blpk::pack(src, kTotal, sink, args);
    const std::size_t peak_extra = g_peak.load() - before;
    CHECK(peak_extra <= 8 * kChunk);
    CHECK(peak_extra >= kChunk);  // it does buffer at chunk granularity
  }

  {
    std::ifstream src(dir / "packed", std::ios::binary);
    std::ofstream sink(dir / "out", std::ios::binary);
    reset_peak();
    const std::size_t before = g_live.load();
    blpk::unpack(src, sink);
    const std::size_t peak_extra = g_peak.load() - before;
    CHECK(peak_extra <= 8 * kChunk);
  }

  CHECK(testsupport::read_file_bytes(dir / "out") == data);
}
