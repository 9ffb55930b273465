#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "blpk/cli.hpp"
#include "blpk/container.hpp"
#include "support.hpp"

using namespace blpk;
using testsupport::Bytes;
using testsupport::TempDir;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  return {rc, out.str(), err.str()};
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1))
    ++count;
  return count;
}

}  // namespace

TEST_CASE("compress and decompress reproduce the input") {
  TempDir dir("blpk-cli");
  const auto data = testsupport::mixed_bytes(300'000);
  const auto input = dir / "data.dat";
  testsupport::write_file_bytes(input, data);

  auto r = run_cli({"compress", input.string()});
  CHECK(r.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "data.dat.blp"));

  r = run_cli({"decompress", (dir / "data.dat.blp").string(), (dir / "data.dcmp").string()});
  CHECK(r.exit_code == 0);
  CHECK(testsupport::read_file_bytes(dir / "data.dcmp") == data);
}

TEST_CASE("decompress strips the extension by default") {
  TempDir dir("blpk-cli");
  const auto data = testsupport::mixed_bytes(10'000);
  testsupport::write_file_bytes(dir / "x.bin", data);
  CHECK(run_cli({"compress", (dir / "x.bin").string()}).exit_code == 0);
  std::filesystem::remove(dir / "x.bin");
  CHECK(run_cli({"decompress", (dir / "x.bin.blp").string()}).exit_code == 0);
  CHECK(testsupport::read_file_bytes(dir / "x.bin") == data);

  // without the .blp suffix the output must be explicit
  std::filesystem::rename(dir / "x.bin.blp", dir / "nosuffix");
  CHECK(run_cli({"decompress", (dir / "nosuffix").string()}).exit_code == cli::kExitUsage);
}

TEST_CASE("existing outputs need --force") {
  TempDir dir("blpk-cli");
  const auto data = testsupport::mixed_bytes(5000);
  testsupport::write_file_bytes(dir / "a", data);
  CHECK(run_cli({"compress", (dir / "a").string()}).exit_code == 0);
  CHECK(run_cli({"compress", (dir / "a").string()}).exit_code == cli::kExitUsage);
  CHECK(run_cli({"compress", "--force", (dir / "a").string()}).exit_code == 0);

  CHECK(run_cli({"decompress", (dir / "a.blp").string()}).exit_code == cli::kExitUsage);
  CHECK(run_cli({"decompress", "-f", (dir / "a.blp").string()}).exit_code == 0);
  CHECK(testsupport::read_file_bytes(dir / "a") == data);
}

TEST_CASE("info lists every header field exactly once") {
  TempDir dir("blpk-cli");
  testsupport::write_file_bytes(dir / "a", testsupport::mixed_bytes(50'000));
  REQUIRE(run_cli({"compress", (dir / "a").string()}).exit_code == 0);

  const auto r = run_cli({"info", (dir / "a.blp").string()});
  CHECK(r.exit_code == 0);
  for (const auto* field : {"magic", "format_version", "options", "checksum_id", "typesize",
                            "chunk_size", "last_chunk", "nchunks", "max_app_chunks"})
    CHECK_MESSAGE(count_occurrences(r.out, field) == 1, "field ", field, " in:\n", r.out);

  // stable key: value lines
  CHECK(r.out.find("magic: blpk\n") != std::string::npos);
  CHECK(r.out.find("format_version: 3\n") != std::string::npos);
  CHECK(r.out.find("chunk_size: 1048576\n") != std::string::npos);
}

TEST_CASE("info --json is machine readable") {
  TempDir dir("blpk-cli");
  testsupport::write_file_bytes(dir / "a", testsupport::mixed_bytes(1000));
  REQUIRE(run_cli({"compress", (dir / "a").string()}).exit_code == 0);
  const auto r = run_cli({"info", "--json", (dir / "a.blp").string()});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"magic\": \"blpk\"") != std::string::npos);
  CHECK(r.out.find("\"nchunks\": 1") != std::string::npos);
}

TEST_CASE("exit codes follow the table") {
  TempDir dir("blpk-cli");

  SUBCASE("missing input file is an I/O error") {
    CHECK(run_cli({"info", (dir / "missing.blp").string()}).exit_code == cli::kExitIo);
    CHECK(run_cli({"compress", (dir / "missing.dat").string()}).exit_code == cli::kExitIo);
  }

  SUBCASE("bad magic is a format error") {
    testsupport::write_file_bytes(dir / "junk.blp", Bytes(64, 'Z'));
    CHECK(run_cli({"info", (dir / "junk.blp").string()}).exit_code == cli::kExitFormat);
    CHECK(run_cli({"decompress", (dir / "junk.blp").string(), (dir / "out").string()}).exit_code ==
          cli::kExitFormat);
  }

  SUBCASE("corrupted chunk is a checksum error") {
    const auto data = testsupport::mixed_bytes(40'000);
    testsupport::write_file_bytes(dir / "a", data);
    REQUIRE(run_cli({"compress", "-s", "crc32", (dir / "a").string()}).exit_code == 0);
    auto file = testsupport::read_file_bytes(dir / "a.blp");
    file[file.size() - 20] ^= 0x01;  // inside the last chunk's payload
    testsupport::write_file_bytes(dir / "a.blp", file);
    CHECK(run_cli({"decompress", "-f", (dir / "a.blp").string()}).exit_code == cli::kExitChecksum);
  }

  SUBCASE("append without space") {
    const auto data = testsupport::mixed_bytes(65536);
    testsupport::write_file_bytes(dir / "a", data);
    REQUIRE(run_cli({"compress", "-z", "64K", "--max-app-chunks", "0", (dir / "a").string()})
                .exit_code == 0);
    CHECK(run_cli({"append", (dir / "a.blp").string(), (dir / "a").string()}).exit_code ==
          cli::kExitNoSpace);
  }

  SUBCASE("append to an offsets-less file is a format error") {
    const auto data = testsupport::mixed_bytes(1000);
    testsupport::write_file_bytes(dir / "a", data);
    REQUIRE(run_cli({"compress", "--no-offsets", (dir / "a").string()}).exit_code == 0);
    CHECK(run_cli({"append", (dir / "a.blp").string(), (dir / "a").string()}).exit_code ==
          cli::kExitFormat);
  }

  SUBCASE("usage errors") {
    CHECK(run_cli({}).exit_code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).exit_code == cli::kExitUsage);
    CHECK(run_cli({"compress"}).exit_code == cli::kExitUsage);
    CHECK(run_cli({"compress", "-l", "11", "x"}).exit_code == cli::kExitUsage);
  }
}

TEST_CASE("append via the CLI extends the file") {
  TempDir dir("blpk-cli");
  const auto first = testsupport::mixed_bytes(65536, 1);
  const auto second = testsupport::mixed_bytes(30'000, 2);
  testsupport::write_file_bytes(dir / "first", first);
  testsupport::write_file_bytes(dir / "second", second);

  REQUIRE(run_cli({"compress", "-z", "64K", (dir / "first").string()}).exit_code == 0);
  REQUIRE(run_cli({"append", (dir / "first.blp").string(), (dir / "second").string()}).exit_code ==
          0);
  REQUIRE(run_cli({"decompress", (dir / "first.blp").string(), (dir / "joined").string()})
              .exit_code == 0);

  Bytes expect = first;
  expect.insert(expect.end(), second.begin(), second.end());
  CHECK(testsupport::read_file_bytes(dir / "joined") == expect);
}

TEST_CASE("chunk size suffixes and checksum flag reach the header") {
  TempDir dir("blpk-cli");
  testsupport::write_file_bytes(dir / "a", testsupport::mixed_bytes(200'000));
  REQUIRE(run_cli({"compress", "-z", "64K", "-s", "sha256", (dir / "a").string()}).exit_code == 0);
  const FileInfo fi = info_file(dir / "a.blp");
  CHECK(fi.header.chunk_size == 65536);
  CHECK(fi.header.checksum == Checksum::sha256);
  CHECK(fi.header.nchunks == 4);
  CHECK(run_cli({"decompress", "-f", (dir / "a.blp").string()}).exit_code == 0);
}

TEST_CASE("help exits zero") {
  const auto r = run_cli({"--help"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("compress") != std::string::npos);
}
