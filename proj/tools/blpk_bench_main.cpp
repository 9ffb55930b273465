#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blpk/bench.hpp"
#include "blpk/error.hpp"

namespace bench = blpk::bench;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blpk-bench - serializer benchmark matrix"};

  std::string config_path, sizes_filter, entropies_filter, storage, out_path = "bench.csv";
  bool large = false, cold = false, no_sync = false;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--sizes", sizes_filter, "Comma list: small,mid,large");
  app.add_option("--entropies", entropies_filter, "Comma list: low,medium,high");
  app.add_option("--storage", storage, "Target directory for the timed files");
  app.add_option("--out", out_path, "CSV output path");
  app.add_option("--seed", seed, "Dataset seed");
  app.add_option("--threads", threads, "Codec worker threads (0: all cores)");
  app.add_flag("--large", large, "Include the 2e8-element size class (1.6 GB)");
  app.add_flag("--cold", cold, "Also time cold-cache reads (needs drop_caches permission)");
  app.add_flag("--no-sync", no_sync, "Skip fsync after writes");
  CLI11_PARSE(app, argc, argv);

  try {
    bench::BenchConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) {
        std::cerr << "error: cannot open config '" << config_path << "'\n";
        return 4;
      }
      std::stringstream ss;
      ss << is.rdbuf();
      cfg = bench::config_from_json(ss.str());
    }
    if (large) cfg.sizes.push_back({"large", 200'000'000, 3, 3});
    if (!sizes_filter.empty()) {
      const auto wanted = split_csv(sizes_filter);
      std::erase_if(cfg.sizes, [&](const bench::SizeClass& s) {
        return std::find(wanted.begin(), wanted.end(), s.name) == wanted.end();
      });
    }
    if (!entropies_filter.empty()) {
      const auto wanted = split_csv(entropies_filter);
      std::erase_if(cfg.entropies, [&](bench::Entropy e) {
        return std::find(wanted.begin(), wanted.end(), bench::entropy_name(e)) == wanted.end();
      });
    }
    if (!storage.empty()) {
      cfg.storage_dir = storage;
      cfg.storage_label = storage;
    }
    if (seed) cfg.seed = seed;
    if (threads) cfg.n_threads = threads;
    if (cold) cfg.cold_cache = true;
    if (no_sync) cfg.sync_after_write = false;

    const auto records = bench::run_matrix(cfg, &std::cerr);
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "error: cannot open '" << out_path << "'\n";
      return 4;
    }
    bench::write_csv(os, records);
    std::cerr << records.size() << " rows -> " << out_path << "\n";

    for (const auto& r : records)
      if (!r.error.empty()) return 6;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
