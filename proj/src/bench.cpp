#include "blpk/bench.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <thread>

#include <json.hpp>

#include "blpk/container.hpp"
#include "blpk/detail/bytes.hpp"
#include "blpk/detail/memstream.hpp"
#include "blpk/error.hpp"

namespace fs = std::filesystem;

namespace blpk::bench {

const char* entropy_name(Entropy e) {
  switch (e) {
    case Entropy::low:
      return "low";
    case Entropy::medium:
      return "medium";
    case Entropy::high:
      return "high";
  }
  return "?";
}

std::vector<std::uint8_t> generate_dataset(Entropy entropy, std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint8_t> buf(n * 8);
  switch (entropy) {
    case Entropy::low:
      for (std::uint64_t i = 0; i < n; ++i)
        detail::put_i64le(&buf[i * 8], static_cast<std::int64_t>(i));
      break;
    case Entropy::medium: {
      std::mt19937_64 rng(seed);
      for (std::uint64_t i = 0; i < n; ++i) {
        // 53-bit uniform in [0,1); avoids the implementation-defined
        // std::uniform_real_distribution sequence.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double v = std::sin(2.0 * std::numbers::pi * static_cast<double>(i % 1000) / 1000.0) +
                         (-0.1 + 0.2 * u);
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        detail::put_u64le(&buf[i * 8], bits);
      }
      break;
    }
    case Entropy::high: {
      std::mt19937_64 rng(seed);
      for (std::uint64_t i = 0; i < n; ++i) detail::put_u64le(&buf[i * 8], rng());
      break;
    }
  }
  return buf;
}

double time_once(const std::function<void()>& action, const std::function<void()>& pre_hook,
                 const std::function<void()>& post_hook) {
  if (pre_hook) pre_hook();
  const auto t0 = std::chrono::steady_clock::now();
  action();
  const auto t1 = std::chrono::steady_clock::now();
  if (post_hook) post_hook();
  return std::chrono::duration<double>(t1 - t0).count();
}

double aggregate(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw Error(ErrorCode::empty_samples, "no sets");
  double best = 0;
  bool first = true;
  for (const auto& set : samples) {
    if (set.empty()) throw Error(ErrorCode::empty_samples, "empty set");
    double sum = 0;
    for (double v : set) sum += v;
    const double mean = sum / static_cast<double>(set.size());
    if (first || mean < best) {
      best = mean;
      first = false;
    }
  }
  return best;
}

void sync_file(const fs::path& p) {
  const int fd = ::open(p.c_str(), O_WRONLY);
  if (fd < 0) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "' for sync");
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) throw Error(ErrorCode::io_error, "fsync failed on '" + p.string() + "'");
}

std::string SerializerSpec::id() const {
  switch (kind) {
    case SerializerKind::chunkpack:
      return "chunkpack";
    case SerializerKind::plain_store:
      return "plain";
    case SerializerKind::whole_buffer:
      return "zbuf-zlib";
  }
  return "?";
}

namespace {

constexpr std::size_t kPlainHeaderSize = 32;
constexpr char kPlainMagic[4] = {'p', 'r', 'a', 'w'};
constexpr char kZbufMagic[4] = {'z', 'b', 'u', 'f'};

void write_all(const fs::path& p, const void* data, std::size_t len) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  os.flush();
  if (!os) throw Error(ErrorCode::io_error, "write failed on '" + p.string() + "'");
}

std::vector<std::uint8_t> read_all(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  is.seekg(0, std::ios::end);
  const auto len = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  std::vector<std::uint8_t> buf(len);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(len));
  if (static_cast<std::size_t>(is.gcount()) != len)
    throw Error(ErrorCode::io_error, "short read on '" + p.string() + "'");
  return buf;
}

// plain-store: 32-byte descriptor header followed by the raw buffer.
std::uint64_t plain_write(std::span<const std::uint8_t> data, const fs::path& p) {
  std::array<std::uint8_t, kPlainHeaderSize> header{};
  std::memcpy(header.data(), kPlainMagic, 4);
  detail::put_u64le(&header[8], data.size());
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  os.write(reinterpret_cast<const char*>(header.data()), header.size());
  os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  os.flush();
  if (!os) throw Error(ErrorCode::io_error, "write failed on '" + p.string() + "'");
  return kPlainHeaderSize + data.size();
}

void plain_read(const fs::path& p, std::span<std::uint8_t> out) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  std::array<std::uint8_t, kPlainHeaderSize> header{};
  is.read(reinterpret_cast<char*>(header.data()), header.size());
  if (is.gcount() != static_cast<std::streamsize>(header.size()) ||
      std::memcmp(header.data(), kPlainMagic, 4) != 0 ||
      detail::get_u64le(&header[8]) != out.size())
    throw Error(ErrorCode::io_error, "'" + p.string() + "' is not the expected plain-store file");
  is.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (static_cast<std::size_t>(is.gcount()) != out.size())
    throw Error(ErrorCode::io_error, "short read on '" + p.string() + "'");
}

// whole-buffer baseline: one DEFLATE stream over the entire buffer (zlib),
// so compression holds input and output in memory at once.
std::uint64_t zbuf_write(std::span<const std::uint8_t> data, int level, const fs::path& p) {
  uLongf bound = compressBound(static_cast<uLong>(data.size()));
  std::vector<std::uint8_t> out(kPlainHeaderSize + bound);
  std::memcpy(out.data(), kZbufMagic, 4);
  detail::put_u64le(&out[8], data.size());
  if (compress2(out.data() + kPlainHeaderSize, &bound, data.data(),
                static_cast<uLong>(data.size()), level) != Z_OK)
    throw Error(ErrorCode::io_error, "zlib compress2 failed");
  out.resize(kPlainHeaderSize + bound);
  write_all(p, out.data(), out.size());
  return out.size();
}

void zbuf_read(const fs::path& p, std::span<std::uint8_t> out) {
  const auto file = read_all(p);
  if (file.size() < kPlainHeaderSize || std::memcmp(file.data(), kZbufMagic, 4) != 0 ||
      detail::get_u64le(&file[8]) != out.size())
    throw Error(ErrorCode::io_error, "'" + p.string() + "' is not the expected zbuf file");
  uLongf len = static_cast<uLongf>(out.size());
  if (uncompress(out.data(), &len, file.data() + kPlainHeaderSize,
                 static_cast<uLong>(file.size() - kPlainHeaderSize)) != Z_OK ||
      len != out.size())
    throw Error(ErrorCode::io_error, "zlib uncompress failed");
}

// chunkpack mirrors the harness settings: shuffle on, no checksum, no offsets.
PackArgs chunkpack_args(int level, int n_threads) {
  PackArgs args;
  args.codec.level = level;
  args.codec.typesize = 8;
  args.codec.shuffle = true;
  args.codec.n_threads = n_threads;
  args.checksum = Checksum::none;
  args.offsets_enabled = false;
  return args;
}

std::uint64_t chunkpack_write(std::span<const std::uint8_t> data, int level, int n_threads,
                              const fs::path& p) {
  detail::imemstream src(data);
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  const FileInfo fi = pack(src, data.size(), os, chunkpack_args(level, n_threads));
  return fi.file_bytes;
}

class SpanSink : public std::streambuf {
 public:
  explicit SpanSink(std::span<std::uint8_t> out) {
    auto* p = reinterpret_cast<char*>(out.data());
    setp(p, p + out.size());
  }
  std::size_t written() const { return static_cast<std::size_t>(pptr() - pbase()); }
};

void chunkpack_read(const fs::path& p, std::span<std::uint8_t> out) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open '" + p.string() + "'");
  SpanSink sink_buf(out);
  std::ostream sink(&sink_buf);
  const UnpackResult r = unpack(is, sink);
  if (r.nbytes != out.size() || sink_buf.written() != out.size())
    throw Error(ErrorCode::io_error, "decompressed size mismatch");
}

bool drop_page_cache() {
  std::ofstream os("/proc/sys/vm/drop_caches");
  if (!os) return false;
  os << "3\n";
  os.flush();
  return static_cast<bool>(os);
}

std::uint64_t fnv1a(std::span<const std::uint8_t> data) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<BenchRecord> run_matrix(const BenchConfig& cfg, std::ostream* log) {
  BenchConfig c = cfg;
  if (c.storage_dir.empty()) c.storage_dir = fs::temp_directory_path() / "blpk-bench";
  fs::create_directories(c.storage_dir);
  if (c.n_threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    c.n_threads = hw ? static_cast<int>(hw) : 1;
  }

  std::vector<BenchRecord> records;
  std::vector<std::uint8_t> roundtrip;
  for (const SizeClass& size : c.sizes) {
    for (Entropy entropy : c.entropies) {
      const auto data = generate_dataset(entropy, size.elements, c.seed);
      const std::uint64_t input_hash = fnv1a(data);
      double plain_write_time = 0;

      // plain-store first: its write time anchors beats_plain for the cell.
      std::vector<SerializerSpec> ordered = c.serializers;
      std::stable_partition(ordered.begin(), ordered.end(), [](const SerializerSpec& s) {
        return s.kind == SerializerKind::plain_store;
      });

      for (const SerializerSpec& spec : ordered) {
        BenchRecord rec;
        rec.serializer = spec.id();
        if (spec.kind != SerializerKind::plain_store) rec.level = spec.level;
        rec.size_class = size.name;
        rec.entropy = entropy_name(entropy);
        rec.storage = c.storage_label;
        rec.sets = size.sets;
        rec.runs = size.runs;
        rec.seed = c.seed;

        const fs::path file =
            c.storage_dir / (size.name + "_" + rec.entropy + "_" + rec.serializer +
                             (rec.level ? "_l" + std::to_string(*rec.level) : "") + ".bin");
        try {
          auto write_action = [&]() -> std::uint64_t {
            std::uint64_t file_bytes = 0;
            switch (spec.kind) {
              case SerializerKind::chunkpack:
                file_bytes = chunkpack_write(data, spec.level, c.n_threads, file);
                break;
              case SerializerKind::plain_store:
                file_bytes = plain_write(data, file);
                break;
              case SerializerKind::whole_buffer:
                file_bytes = zbuf_write(data, spec.level, file);
                break;
            }
            if (c.sync_after_write) sync_file(file);
            return file_bytes;
          };
          auto read_action = [&](std::span<std::uint8_t> out) {
            switch (spec.kind) {
              case SerializerKind::chunkpack:
                chunkpack_read(file, out);
                break;
              case SerializerKind::plain_store:
                plain_read(file, out);
                break;
              case SerializerKind::whole_buffer:
                zbuf_read(file, out);
                break;
            }
          };

          // Round-trip must hold before any timing is kept.
          const std::uint64_t file_bytes = write_action();
          roundtrip.assign(data.size(), 0);
          read_action(roundtrip);
          if (fnv1a(roundtrip) != input_hash)
            throw Error(ErrorCode::io_error, "round-trip verification failed");
          rec.ratio = static_cast<double>(data.size()) / static_cast<double>(file_bytes);

          std::vector<std::vector<double>> w_samples(size.sets), hot_samples(size.sets),
              cold_samples(size.sets);
          bool cold_ok = c.cold_cache;
          for (int s = 0; s < size.sets; ++s) {
            for (int r = 0; r < size.runs; ++r) {
              w_samples[s].push_back(time_once([&] { write_action(); }));
              hot_samples[s].push_back(time_once([&] { read_action(roundtrip); },
                                                 [&] { read_all(file); }));
              if (cold_ok) {
                if (!drop_page_cache()) {
                  cold_ok = false;
                } else {
                  cold_samples[s].push_back(time_once([&] { read_action(roundtrip); }));
                }
              }
            }
          }
          rec.t_compress_s = aggregate(w_samples);
          rec.t_decomp_hot_s = aggregate(hot_samples);
          if (cold_ok) rec.t_decomp_cold_s = aggregate(cold_samples);

          if (spec.kind == SerializerKind::plain_store) plain_write_time = rec.t_compress_s;
          rec.beats_plain = plain_write_time > 0 && rec.t_compress_s < plain_write_time;
          if (log)
            *log << rec.size_class << "/" << rec.entropy << " " << rec.serializer
                 << (rec.level ? "-l" + std::to_string(*rec.level) : "") << ": write "
                 << rec.t_compress_s << "s, hot read " << rec.t_decomp_hot_s << "s, ratio "
                 << rec.ratio << "\n";
        } catch (const std::exception& e) {
          rec.error = e.what();
          if (log)
            *log << rec.size_class << "/" << rec.entropy << " " << rec.serializer
                 << " FAILED: " << e.what() << "\n";
        }
        std::error_code ec;
        fs::remove(file, ec);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "serializer,level,size_class,entropy,storage,t_compress_s,t_decomp_cold_s,"
        "t_decomp_hot_s,ratio,sets,runs,seed\n";
  for (const BenchRecord& r : records) {
    os << r.serializer << ",";
    if (r.level) os << *r.level;
    os << "," << r.size_class << "," << r.entropy << "," << r.storage << ",";
    if (r.error.empty()) {
      os << r.t_compress_s << ",";
      if (r.t_decomp_cold_s) os << *r.t_decomp_cold_s;
      os << "," << r.t_decomp_hot_s << "," << r.ratio;
    } else {
      os << ",,,";
    }
    os << "," << r.sets << "," << r.runs << "," << r.seed << "\n";
  }
}

BenchConfig config_from_json(const std::string& text) {
  BenchConfig cfg;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("bad config: ") + e.what());
  }
  if (doc.contains("sizes")) {
    cfg.sizes.clear();
    for (const auto& s : doc["sizes"])
      cfg.sizes.push_back({s.at("name").get<std::string>(), s.at("elements").get<std::uint64_t>(),
                           s.value("sets", 1), s.value("runs", 1)});
  }
  if (doc.contains("entropies")) {
    cfg.entropies.clear();
    for (const auto& e : doc["entropies"]) {
      const auto name = e.get<std::string>();
      if (name == "low")
        cfg.entropies.push_back(Entropy::low);
      else if (name == "medium")
        cfg.entropies.push_back(Entropy::medium);
      else if (name == "high")
        cfg.entropies.push_back(Entropy::high);
      else
        throw Error(ErrorCode::invalid_argument, "unknown entropy '" + name + "'");
    }
  }
  if (doc.contains("serializers")) {
    cfg.serializers.clear();
    for (const auto& s : doc["serializers"]) {
      const auto kind = s.at("kind").get<std::string>();
      SerializerSpec spec;
      if (kind == "chunkpack")
        spec.kind = SerializerKind::chunkpack;
      else if (kind == "plain")
        spec.kind = SerializerKind::plain_store;
      else if (kind == "zbuf")
        spec.kind = SerializerKind::whole_buffer;
      else
        throw Error(ErrorCode::invalid_argument, "unknown serializer '" + kind + "'");
      spec.level = s.value("level", 0);
      cfg.serializers.push_back(spec);
    }
  }
  if (doc.contains("storage")) cfg.storage_dir = doc["storage"].get<std::string>();
  if (doc.contains("storage_label")) cfg.storage_label = doc["storage_label"].get<std::string>();
  if (doc.contains("sync")) cfg.sync_after_write = doc["sync"].get<bool>();
  if (doc.contains("cold")) cfg.cold_cache = doc["cold"].get<bool>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("threads")) cfg.n_threads = doc["threads"].get<int>();
  return cfg;
}

}  // namespace blpk::bench
