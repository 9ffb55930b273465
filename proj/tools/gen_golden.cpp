// Regenerates the golden vectors under tests/golden/. Run from the repo root
// after a deliberate format change; the files are committed and the tests
// compare against them byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blpk/container.hpp"
#include "blpk/detail/memstream.hpp"
#include "blpk/format.hpp"
#include "blpk/lz.hpp"

namespace {

void dump(const std::filesystem::path& p, std::span<const std::uint8_t> bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::printf("%s: %zu bytes\n", p.string().c_str(), bytes.size());
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "tests/golden";
  std::filesystem::create_directories(dir);

  blpk::FileHeader h;
  h.checksum = blpk::Checksum::none;
  h.typesize = 8;
  h.chunk_size = 1 << 20;
  h.last_chunk = 80000;
  h.nchunks = 1;
  h.max_app_chunks = 10;
  h.options = blpk::kOptionOffsets;
  dump(dir / "header_default.bin", blpk::encode_header(h));

  blpk::MetadataSection m;
  m.payload = "{\"k\":1}";
  m.alloc_size = 32;
  m.checksum = blpk::Checksum::crc32;
  dump(dir / "metadata_crc32.bin", blpk::encode_metadata_section(m));

  dump(dir / "offsets_pair.bin", blpk::encode_offsets({{288, -1}}));

  std::vector<std::uint8_t> pattern;
  for (int i = 0; i < 400; ++i) pattern.push_back("abc"[i % 3]);
  dump(dir / "lz_abc_l7.bin", *blpk::lz_compress_block(7, pattern));

  std::vector<std::uint8_t> data(1000);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i / 8);
  blpk::PackArgs args;
  args.codec.level = 3;
  args.codec.typesize = 8;
  args.codec.n_threads = 1;
  args.checksum = blpk::Checksum::crc32;
  args.metadata = "{\"k\":1}";
  args.metadata_alloc = 32;
  args.max_app_chunks = 3;
  blpk::detail::imemstream src(data);
  std::stringstream sink;
  blpk::pack(src, data.size(), sink, args);
  const std::string file = sink.str();
  dump(dir / "tiny.blp",
       std::span(reinterpret_cast<const std::uint8_t*>(file.data()), file.size()));
  return 0;
}
