#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Benchmark harness: generates datasets of graded entropy, times pack/unpack
// for several serializers against a storage directory, aggregates repeated
// runs as mean-per-set-then-min-across-sets, and emits one CSV row per cell.

namespace blpk::bench {

enum class Entropy { low, medium, high };

const char* entropy_name(Entropy e);

/// Buffers hold n 8-byte elements:
///   low     consecutive signed 64-bit integers 0..n-1
///   medium  sin(2*pi*i/1000) plus uniform noise in [-0.1, 0.1]
///   high    64 fresh PRNG bits per element
/// All deterministic for a fixed seed.
std::vector<std::uint8_t> generate_dataset(Entropy entropy, std::uint64_t n, std::uint64_t seed);

/// Seconds for action() alone; hooks run outside the timed region. Write
/// actions that must hit the medium should flush and sync inside `action`.
double time_once(const std::function<void()>& action,
                 const std::function<void()>& pre_hook = {},
                 const std::function<void()>& post_hook = {});

/// Mean across runs within each set, then minimum across sets.
double aggregate(const std::vector<std::vector<double>>& samples);

/// open+write+fsync+close to force the bytes onto the medium.
void sync_file(const std::filesystem::path& p);

enum class SerializerKind { chunkpack, plain_store, whole_buffer };

struct SerializerSpec {
  SerializerKind kind = SerializerKind::chunkpack;
  int level = 0;  // ignored by plain_store

  std::string id() const;
};

struct SizeClass {
  std::string name;
  std::uint64_t elements = 0;
  int sets = 1;
  int runs = 1;
};

struct BenchConfig {
  std::vector<SizeClass> sizes = {{"small", 10'000, 10, 10}, {"mid", 10'000'000, 5, 5}};
  std::vector<Entropy> entropies = {Entropy::low, Entropy::medium, Entropy::high};
  std::vector<SerializerSpec> serializers = {
      {SerializerKind::chunkpack, 1},    {SerializerKind::chunkpack, 3},
      {SerializerKind::chunkpack, 7},    {SerializerKind::chunkpack, 9},
      {SerializerKind::plain_store, 0},  {SerializerKind::whole_buffer, 1},
      {SerializerKind::whole_buffer, 3}, {SerializerKind::whole_buffer, 7},
  };
  std::filesystem::path storage_dir;  // empty: <temp>/blpk-bench
  std::string storage_label = "dir";
  bool sync_after_write = true;
  bool cold_cache = false;  // needs permission to drop the page cache
  std::uint64_t seed = 42;
  int n_threads = 0;  // 0: hardware concurrency
};

struct BenchRecord {
  std::string serializer;
  std::optional<int> level;
  std::string size_class;
  std::string entropy;
  std::string storage;
  double t_compress_s = 0;
  std::optional<double> t_decomp_cold_s;
  double t_decomp_hot_s = 0;
  double ratio = 0;
  bool beats_plain = false;  // t_compress < plain-store write time for the cell
  int sets = 0;
  int runs = 0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the cell failed
};

/// Runs the full (size x entropy x serializer) grid; failed cells keep their
/// row with `error` set and the matrix continues.
std::vector<BenchRecord> run_matrix(const BenchConfig& cfg, std::ostream* log = nullptr);

/// Columns: serializer,level,size_class,entropy,storage,t_compress_s,
/// t_decomp_cold_s,t_decomp_hot_s,ratio,sets,runs,seed
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

/// Parses a JSON config document; missing keys keep their defaults.
BenchConfig config_from_json(const std::string& text);

}  // namespace blpk::bench
