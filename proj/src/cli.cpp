#include "blpk/cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "blpk/container.hpp"
#include "blpk/error.hpp"

namespace fs = std::filesystem;

namespace blpk::cli {

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::checksum_mismatch:
      return kExitChecksum;
    case ErrorCode::no_append_space:
      return kExitNoSpace;
    case ErrorCode::io_error:
      return kExitIo;
    case ErrorCode::invalid_argument:
      return kExitUsage;
    default:
      return kExitFormat;
  }
}

int detected_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n ? static_cast<int>(n) : 1;
}

void require_absent(const fs::path& p, bool force) {
  if (!force && fs::exists(p))
    throw Error(ErrorCode::invalid_argument,
                "'" + p.string() + "' exists, pass --force to overwrite");
}

void require_present(const fs::path& p) {
  if (!fs::exists(p)) throw Error(ErrorCode::io_error, "'" + p.string() + "' does not exist");
}

std::string options_text(const FileHeader& h) {
  std::ostringstream os;
  os << "0x" << std::hex << static_cast<int>(h.options) << std::dec << " (";
  os << (h.offsets_present() ? "offsets" : "no offsets") << ", ";
  os << (h.metadata_present() ? "metadata" : "no metadata") << ")";
  return os.str();
}

void print_info_text(std::ostream& out, const FileInfo& fi) {
  const FileHeader& h = fi.header;
  out << "magic: blpk\n";
  out << "format_version: " << static_cast<int>(h.format_version) << "\n";
  out << "options: " << options_text(h) << "\n";
  out << "checksum_id: " << static_cast<int>(h.checksum) << " (" << checksum_name(h.checksum)
      << ")\n";
  out << "typesize: " << static_cast<int>(h.typesize) << "\n";
  out << "chunk_size: " << h.chunk_size << "\n";
  out << "last_chunk: " << h.last_chunk << "\n";
  out << "nchunks: " << h.nchunks << "\n";
  out << "max_app_chunks: " << h.max_app_chunks << "\n";
  out << "file_bytes: " << fi.file_bytes << "\n";
  out << "data_bytes: " << fi.data_bytes << "\n";
  out << "ratio: " << fi.ratio << "\n";
  if (fi.metadata) out << "metadata: " << *fi.metadata << "\n";
  out << "cbytes:";
  constexpr std::size_t kShow = 16;
  for (std::size_t i = 0; i < fi.chunk_cbytes.size() && i < kShow; ++i)
    out << " " << fi.chunk_cbytes[i];
  if (fi.chunk_cbytes.size() > kShow) out << " ... (" << fi.chunk_cbytes.size() << " total)";
  out << "\n";
  if (fi.offsets) {
    out << "offsets:";
    for (std::size_t i = 0; i < fi.offsets->size() && i < kShow; ++i)
      out << " " << (*fi.offsets)[i];
    if (fi.offsets->size() > kShow) out << " ... (" << fi.offsets->size() << " slots)";
    out << "\n";
  }
}

void print_info_json(std::ostream& out, const FileInfo& fi) {
  const FileHeader& h = fi.header;
  nlohmann::ordered_json doc;
  doc["magic"] = "blpk";
  doc["format_version"] = h.format_version;
  doc["options"] = h.options;
  doc["checksum_id"] = static_cast<int>(h.checksum);
  doc["checksum"] = checksum_name(h.checksum);
  doc["typesize"] = h.typesize;
  doc["chunk_size"] = h.chunk_size;
  doc["last_chunk"] = h.last_chunk;
  doc["nchunks"] = h.nchunks;
  doc["max_app_chunks"] = h.max_app_chunks;
  doc["file_bytes"] = fi.file_bytes;
  doc["data_bytes"] = fi.data_bytes;
  doc["ratio"] = fi.ratio;
  if (fi.metadata) {
    auto meta = nlohmann::json::parse(*fi.metadata, nullptr, false);
    doc["metadata"] = meta.is_discarded() ? nlohmann::json(*fi.metadata) : meta;
  }
  doc["cbytes"] = fi.chunk_cbytes;
  if (fi.offsets) doc["offsets"] = *fi.offsets;
  out << doc.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"blpk - chunked compressed storage for binary data"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  1  usage error, or refusing to overwrite without --force\n"
      "  2  format error (bad magic, unsupported version, corrupt data,\n"
      "     append to a partial chunk or to a file without offsets)\n"
      "  3  checksum mismatch\n"
      "  4  I/O error\n"
      "  5  append slots exhausted");

  int n_threads = detected_threads();
  bool verbose = false;
  app.add_option("-n,--nthreads", n_threads, "Worker threads for block compression")
      ->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "Chatty progress on stderr");

  // compress
  auto* compress = app.add_subcommand("compress", "Compress a file");
  std::string c_in, c_out;
  int level = 7;
  int typesize = 8;
  std::uint64_t chunk_size = 1 << 20;
  std::string checksum = "adler32";
  bool no_shuffle = false, no_offsets = false, c_force = false;
  std::int64_t max_app_chunks = -1;
  compress->add_option("input", c_in, "File to compress")->required();
  compress->add_option("output", c_out, "Output file (default: <input>.blp)");
  compress->add_option("-l,--level", level, "Compression level 0-9")->check(CLI::Range(0, 9));
  compress->add_option("-t,--typesize", typesize, "Element size in bytes for the shuffle filter")
      ->check(CLI::Range(1, 255));
  compress->add_option("-z,--chunk-size", chunk_size, "Chunk size, suffixes K/M/G")
      ->transform(CLI::AsSizeValue(false));
  compress->add_option("-s,--checksum", checksum, "none, adler32, crc32 or sha256");
  compress->add_flag("--no-shuffle", no_shuffle, "Disable the byte shuffle filter");
  compress->add_flag("--no-offsets", no_offsets, "Skip the chunk offsets section (disables append)");
  compress->add_option("--max-app-chunks", max_app_chunks,
                       "Pre-allocated append slots (default 10x chunk count)");
  compress->add_flag("-f,--force", c_force, "Overwrite an existing output file");

  // decompress
  auto* decompress = app.add_subcommand("decompress", "Decompress a file");
  std::string d_in, d_out;
  bool d_force = false;
  decompress->add_option("input", d_in, "File to decompress")->required();
  decompress->add_option("output", d_out, "Output file (default: input minus .blp)");
  decompress->add_flag("-f,--force", d_force, "Overwrite an existing output file");

  // append
  auto* append_cmd = app.add_subcommand("append", "Append raw data to an existing file");
  std::string a_file, a_data;
  int a_level = 7;
  bool a_no_shuffle = false;
  append_cmd->add_option("file", a_file, "Existing .blp file")->required();
  append_cmd->add_option("data", a_data, "Raw file whose bytes are appended")->required();
  append_cmd->add_option("-l,--level", a_level, "Compression level 0-9")->check(CLI::Range(0, 9));
  append_cmd->add_flag("--no-shuffle", a_no_shuffle, "Disable the byte shuffle filter");

  // info
  auto* info_cmd = app.add_subcommand("info", "Inspect header and metadata");
  std::string i_in;
  bool as_json = false;
  info_cmd->add_option("file", i_in, "File to inspect")->required();
  info_cmd->add_flag("--json", as_json, "Machine-readable output");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("blpk");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*compress) {
      if (chunk_size < 1 || chunk_size > 0x7fffffffull)
        throw Error(ErrorCode::invalid_argument, "chunk size must be in 1..2^31-1 bytes");
      PackArgs pack_args;
      pack_args.codec.level = level;
      pack_args.codec.typesize = static_cast<unsigned>(typesize);
      pack_args.codec.shuffle = !no_shuffle;
      pack_args.codec.n_threads = n_threads;
      pack_args.chunk_size = static_cast<std::int32_t>(chunk_size);
      pack_args.checksum = checksum_from_name(checksum);
      pack_args.offsets_enabled = !no_offsets;
      pack_args.max_app_chunks = max_app_chunks;
      const fs::path in = c_in;
      const fs::path out_path = c_out.empty() ? fs::path(c_in + kDefaultExtension) : fs::path(c_out);
      require_present(in);
      require_absent(out_path, c_force);
      const FileInfo fi = pack_file(in, out_path, pack_args);
      if (verbose)
        err << "packed " << fi.data_bytes << " bytes into " << fi.file_bytes << " ("
            << fi.header.nchunks << " chunks, ratio " << fi.ratio << ")\n";
    } else if (*decompress) {
      const fs::path in = d_in;
      fs::path out_path;
      if (!d_out.empty()) {
        out_path = d_out;
      } else if (in.extension() == kDefaultExtension) {
        out_path = in.parent_path() / in.stem();
      } else {
        throw Error(ErrorCode::invalid_argument,
                    "input has no " + std::string(kDefaultExtension) +
                        " extension, name the output explicitly");
      }
      require_present(in);
      require_absent(out_path, d_force);
      const UnpackResult r = unpack_file(in, out_path);
      if (verbose) err << "unpacked " << r.nbytes << " bytes to " << out_path.string() << "\n";
    } else if (*append_cmd) {
      require_present(a_file);
      require_present(a_data);
      CodecParams codec;
      codec.level = a_level;
      codec.shuffle = !a_no_shuffle;
      codec.n_threads = n_threads;
      const std::int64_t nchunks = append_file(a_file, a_data, codec);
      if (verbose) err << "file now holds " << nchunks << " chunks\n";
    } else if (*info_cmd) {
      require_present(i_in);
      const FileInfo fi = info_file(i_in);
      if (as_json)
        print_info_json(out, fi);
      else
        print_info_text(out, fi);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace blpk::cli
