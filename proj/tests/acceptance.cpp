// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Run them all with ./blpk-acceptance, or one at a time via
// ctest -R acceptance.

#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "blpk/bench.hpp"
#include "blpk/chunk.hpp"
#include "blpk/cli.hpp"
#include "blpk/container.hpp"
#include "blpk/detail/memstream.hpp"
#include "blpk/lz.hpp"
#include "blpk/ndarray.hpp"
#include "blpk/ref.hpp"
#include "blpk/shuffle.hpp"
#include "support.hpp"

using namespace blpk;
using testsupport::Bytes;
using testsupport::TempDir;

namespace {

struct Criterion {
  int n;
  const char* desc;
  bool ok = true;

  ~Criterion() {
    std::printf("[criterion %2d] %s  %s\n", n, ok ? "PASS" : "FAIL", desc);
    std::fflush(stdout);
  }
};

#define EXPECT(crit, cond)                  \
  do {                                      \
    const bool expect_v = (cond);           \
    (crit).ok = (crit).ok && expect_v;      \
    CHECK_MESSAGE(expect_v, #cond);         \
  } while (0)

std::string pack_to_string(const Bytes& data, const PackArgs& args, FileInfo* fi = nullptr) {
  detail::imemstream src(data);
  std::stringstream sink(std::ios::binary | std::ios::in | std::ios::out);
  const FileInfo info = pack(src, data.size(), sink, args);
  if (fi) *fi = info;
  return sink.str();
}

Bytes unpack_string(const std::string& file) {
  std::istringstream src(file, std::ios::binary);
  std::ostringstream sink(std::ios::binary);
  unpack(src, sink);
  const std::string s = sink.str();
  return Bytes(s.begin(), s.end());
}

const bench::BenchRecord& find_record(const std::vector<bench::BenchRecord>& records,
                                      const std::string& serializer, int level) {
  for (const auto& r : records)
    if (r.serializer == serializer && ((serializer == "plain" && !r.level) || r.level == level))
      return r;
  throw std::runtime_error("record not found: " + serializer);
}

}  // namespace

TEST_CASE("criterion 1: round-trip suite across sizes, levels, shuffle, typesize, checksums") {
  Criterion crit{1, "unpack(pack(x)) == x over the full parameter grid"};
  const std::size_t mib = 1u << 20;
  const std::size_t sizes[] = {0, 1, 4096, mib - 1, mib, mib + 1, 8 * mib + 17};
  std::mt19937_64 rng(101);
  for (const std::size_t n : sizes) {
    const auto data = testsupport::mixed_bytes(n, rng());
    for (const int level : {1, 3, 7, 9}) {
      for (const bool shuf : {true, false}) {
        for (const unsigned ts : {1u, 2u, 4u, 8u}) {
          for (const auto cksum : {Checksum::none, Checksum::crc32}) {
            PackArgs args;
            args.codec.level = level;
            args.codec.shuffle = shuf;
            args.codec.typesize = ts;
            args.codec.n_threads = 2;
            args.checksum = cksum;
            const auto file = pack_to_string(data, args);
            if (unpack_string(file) != data) {
              EXPECT(crit, false);
              return;
            }
          }
        }
      }
    }
  }
  EXPECT(crit, true);
}

TEST_CASE("criterion 2: packed bytes independent of thread count") {
  Criterion crit{2, "identical file bytes for 1, 2 and 4 worker threads"};
  const auto data = bench::generate_dataset(bench::Entropy::medium, (8u << 20) / 8, 77);
  PackArgs args;
  args.codec.level = 7;
  args.codec.typesize = 8;
  args.checksum = Checksum::crc32;

  args.codec.n_threads = 1;
  const auto one = pack_to_string(data, args);
  args.codec.n_threads = 2;
  const auto two = pack_to_string(data, args);
  args.codec.n_threads = 4;
  const auto four = pack_to_string(data, args);
  EXPECT(crit, two == one);
  EXPECT(crit, four == one);
}

TEST_CASE("criterion 3: low-entropy ratio and speed against the DEFLATE baseline") {
  Criterion crit{3, "1e7 integers: ratio >= 10 and compression 10x faster than zbuf level 7"};
  TempDir dir("blpk-acc3");
  bench::BenchConfig cfg;
  cfg.sizes = {{"mid", 10'000'000, 1, 2}};
  cfg.entropies = {bench::Entropy::low};
  cfg.serializers = {{bench::SerializerKind::chunkpack, 7},
                     {bench::SerializerKind::chunkpack, 1},
                     {bench::SerializerKind::whole_buffer, 7}};
  cfg.storage_dir = dir.path;
  cfg.seed = 42;
  const auto records = bench::run_matrix(cfg);
  for (const auto& r : records) REQUIRE_MESSAGE(r.error.empty(), r.error);

  const auto& cp7 = find_record(records, "chunkpack", 7);
  const auto& cp1 = find_record(records, "chunkpack", 1);
  const auto& zb7 = find_record(records, "zbuf-zlib", 7);
  MESSAGE("chunkpack l7: ", cp7.t_compress_s, "s ratio ", cp7.ratio, "; chunkpack l1: ",
          cp1.t_compress_s, "s; zbuf l7: ", zb7.t_compress_s, "s");
  EXPECT(crit, cp7.ratio >= 10.0);
  EXPECT(crit, cp7.t_compress_s * 10.0 <= zb7.t_compress_s);
  EXPECT(crit, cp1.t_compress_s * 10.0 <= zb7.t_compress_s);
}

TEST_CASE("criterion 4: high-entropy data passes through at plain-store speed") {
  Criterion crit{4, "1e7 random elements: ratio within 5% of 1, compression <= 3x plain write"};
  TempDir dir("blpk-acc4");
  bench::BenchConfig cfg;
  cfg.sizes = {{"mid", 10'000'000, 3, 3}};
  cfg.entropies = {bench::Entropy::high};
  cfg.serializers = {{bench::SerializerKind::plain_store, 0},
                     {bench::SerializerKind::chunkpack, 7}};
  cfg.storage_dir = dir.path;
  cfg.seed = 42;
  const auto records = bench::run_matrix(cfg);
  for (const auto& r : records) REQUIRE_MESSAGE(r.error.empty(), r.error);

  const auto& cp = find_record(records, "chunkpack", 7);
  const auto& plain = find_record(records, "plain", 0);
  MESSAGE("chunkpack: ", cp.t_compress_s, "s ratio ", cp.ratio, "; plain: ", plain.t_compress_s,
          "s");
  EXPECT(crit, cp.ratio >= 0.95);
  EXPECT(crit, cp.ratio <= 1.05);
  EXPECT(crit, cp.t_compress_s <= 3.0 * plain.t_compress_s);
  EXPECT(crit, plain.ratio >= 0.99);
  EXPECT(crit, plain.ratio <= 1.01);
}

TEST_CASE("criterion 5: append fills pre-allocated slots and then refuses") {
  Criterion crit{5, "2 MiB + 2 MiB append round-trips; exhausted slots raise NoAppendSpace"};
  const auto first = testsupport::mixed_bytes(2u << 20, 1);
  const auto second = testsupport::mixed_bytes(2u << 20, 2);

  PackArgs args;
  args.codec.n_threads = 2;
  args.chunk_size = 1 << 20;
  args.max_app_chunks = 2;
  std::stringstream file(std::ios::binary | std::ios::in | std::ios::out);
  detail::imemstream src(first);
  pack(src, first.size(), file, args);

  detail::imemstream more(second);
  const std::int64_t nchunks = append(file, more, second.size(), args.codec);
  EXPECT(crit, nchunks == 4);

  Bytes expect = first;
  expect.insert(expect.end(), second.begin(), second.end());
  EXPECT(crit, unpack_string(file.str()) == expect);

  const Bytes one_more(1, 0x5a);
  detail::imemstream tail(one_more);
  try {
    append(file, tail, one_more.size(), args.codec);
    EXPECT(crit, false);
  } catch (const Error& e) {
    EXPECT(crit, e.code() == ErrorCode::no_append_space);
  }
}

TEST_CASE("criterion 6: single byte flips name the corrupted chunk") {
  Criterion crit{6, "100 random flips in crc32 chunk payloads raise ChecksumMismatch(index)"};
  PackArgs args;
  args.codec.n_threads = 2;
  args.chunk_size = 64 * 1024;
  args.checksum = Checksum::crc32;
  const auto data = testsupport::mixed_bytes(5 * 64 * 1024 + 999, 3);
  FileInfo fi;
  auto file = pack_to_string(data, args, &fi);
  REQUIRE(fi.offsets.has_value());
  REQUIRE(fi.header.nchunks == 6);

  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const auto chunk = static_cast<std::size_t>(rng() % fi.header.nchunks);
    const auto frame_start = static_cast<std::size_t>((*fi.offsets)[chunk]);
    const std::size_t pos = frame_start + rng() % fi.chunk_cbytes[chunk];
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (rng() % 8));

    file[pos] = static_cast<char>(static_cast<std::uint8_t>(file[pos]) ^ mask);
    bool named_correctly = false;
    try {
      unpack_string(file);
    } catch (const Error& e) {
      named_correctly = e.code() == ErrorCode::checksum_mismatch &&
                        e.index() == static_cast<std::int64_t>(chunk);
    }
    if (!named_correctly) {
      MESSAGE("flip at chunk ", chunk, " pos ", pos, " went undetected");
      EXPECT(crit, false);
      return;
    }
    file[pos] = static_cast<char>(static_cast<std::uint8_t>(file[pos]) ^ mask);
  }
  EXPECT(crit, unpack_string(file) == data);  // restored file is intact again
}

TEST_CASE("criterion 7: array round-trip across dtypes, ranks and orders") {
  Criterion crit{7, "descriptors {<i8,<f8,>f8,|S16} x ranks 0-4 x orders {C,F} round-trip"};
  std::mt19937_64 rng(707);
  const std::vector<std::vector<std::uint64_t>> shapes = {
      {},          // rank 0
      {11}, {0},   // rank 1, with and without elements
      {3, 2}, {0, 5},
      {2, 3, 4},
      {2, 1, 3, 2}};
  for (const auto* dtype : {"<i8", "<f8", ">f8", "|S16"}) {
    for (const auto& shape : shapes) {
      for (const Order order : {Order::c, Order::f}) {
        const ArrayDescriptor desc{shape, dtype, order};
        const auto data = testsupport::random_bytes(rng, desc.buffer_bytes());
        std::stringstream sink(std::ios::binary | std::ios::in | std::ios::out);
        PackArgs args;
        args.codec.n_threads = 2;
        pack_array(desc, data, sink, args);
        sink.seekg(0);
        const Array out = unpack_array(sink);
        if (!(out.descriptor == desc) || out.data != data) {
          MESSAGE("failed for dtype ", dtype, " rank ", shape.size());
          EXPECT(crit, false);
          return;
        }
      }
    }
  }
  EXPECT(crit, true);
}

TEST_CASE("criterion 8: shuffle and LZ micro-oracles") {
  Criterion crit{8, "1e4 shuffle pairs invert; 1e4 LZ blocks round-trip; zeros < 64 bytes"};
  std::mt19937_64 rng(808);

  for (int i = 0; i < 10'000; ++i) {
    const unsigned t = 1 + rng() % 16;
    const auto buf = testsupport::random_bytes(rng, rng() % 400);
    if (unshuffle(t, shuffle(t, buf)) != buf || shuffle(t, buf) != ref::shuffle(t, buf)) {
      EXPECT(crit, false);
      return;
    }
  }

  for (int i = 0; i < 10'000; ++i) {
    const std::size_t n = 1 + rng() % 4096;
    Bytes block(n);
    switch (i % 4) {
      case 0:
        block = testsupport::random_bytes(rng, n);
        break;
      case 1:
        for (std::size_t k = 0; k < n; ++k) block[k] = static_cast<std::uint8_t>(k / 5);
        break;
      case 2: {
        const std::size_t period = 1 + rng() % 24;
        for (std::size_t k = 0; k < n; ++k) block[k] = static_cast<std::uint8_t>((k % period) * 11);
        break;
      }
      case 3:
        std::fill(block.begin(), block.end(), static_cast<std::uint8_t>(rng()));
        break;
    }
    const int level = 1 + static_cast<int>(rng() % 9);
    const auto c = lz_compress_block(level, block);
    if (!c) continue;
    if (c->size() >= block.size() || lz_decompress_block(*c, block.size()) != block ||
        ref::lz_decompress_block(*c, block.size()) != block) {
      EXPECT(crit, false);
      return;
    }
  }

  const auto zeros = lz_compress_block(7, Bytes(4096, 0));
  EXPECT(crit, zeros.has_value());
  EXPECT(crit, zeros->size() < 64);
}

TEST_CASE("criterion 9: aggregation is mean per set, then min across sets") {
  Criterion crit{9, "aggregate([[2,2],[1,9]]) == 2 (not the global minimum 1)"};
  EXPECT(crit, bench::aggregate({{2, 2}, {1, 9}}) == 2.0);
  EXPECT(crit, bench::aggregate({{1, 2}, {3, 5}}) == 1.5);
  EXPECT(crit, bench::aggregate({{7}}) == 7.0);
}

TEST_CASE("criterion 10: CLI flows reproduce bytes and exit codes") {
  Criterion crit{10, "compress/decompress round-trip, info fields, exit code table"};
  TempDir dir("blpk-acc10");
  const auto data = testsupport::mixed_bytes(300'000, 10);
  testsupport::write_file_bytes(dir / "data.dat", data);

  auto run_cli = [&](const std::vector<std::string>& args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    return rc;
  };

  EXPECT(crit, run_cli({"compress", (dir / "data.dat").string()}) == 0);
  EXPECT(crit, std::filesystem::exists(dir / "data.dat.blp"));
  EXPECT(crit,
         run_cli({"decompress", (dir / "data.dat.blp").string(), (dir / "data.dcmp").string()}) ==
             0);
  EXPECT(crit, testsupport::read_file_bytes(dir / "data.dcmp") == data);

  std::string info_text;
  EXPECT(crit, run_cli({"info", (dir / "data.dat.blp").string()}, &info_text) == 0);
  for (const auto* field : {"magic", "format_version", "options", "checksum_id", "typesize",
                            "chunk_size", "last_chunk", "nchunks", "max_app_chunks"}) {
    std::size_t count = 0;
    for (std::size_t pos = info_text.find(field); pos != std::string::npos;
         pos = info_text.find(field, pos + 1))
      ++count;
    EXPECT(crit, count == 1);
  }

  // exit code table
  EXPECT(crit, run_cli({"nonsense"}) == cli::kExitUsage);
  EXPECT(crit, run_cli({"info", (dir / "missing.blp").string()}) == cli::kExitIo);

  testsupport::write_file_bytes(dir / "junk.blp", Bytes(64, 'Z'));
  EXPECT(crit, run_cli({"info", (dir / "junk.blp").string()}) == cli::kExitFormat);

  auto file = testsupport::read_file_bytes(dir / "data.dat.blp");
  file[file.size() - 10] ^= 1;
  testsupport::write_file_bytes(dir / "bad.blp", file);
  EXPECT(crit, run_cli({"decompress", (dir / "bad.blp").string(), (dir / "bad.out").string()}) ==
                   cli::kExitChecksum);

  testsupport::write_file_bytes(dir / "full", testsupport::mixed_bytes(65536, 4));
  EXPECT(crit, run_cli({"compress", "-z", "64K", "--max-app-chunks", "0",
                        (dir / "full").string()}) == 0);
  EXPECT(crit, run_cli({"append", (dir / "full.blp").string(), (dir / "full").string()}) ==
                   cli::kExitNoSpace);
}
