#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deep_mou/corpus.hpp"

namespace deepmou::cli {

using Json = nlohmann::json;

// Expands `--config file.json` into ordinary flags placed right after the
// subcommand name, so flags given on the command line (which come later and
// are resolved with TakeLast) win. A manifest is accepted too: its "config"
// object is used.
std::vector<std::string> expand_config(int argc, char** argv);

// Default for --threads: DEEP_MOU_THREADS when set, else 1.
unsigned default_threads();

// Every option of `sub` (except help and config) with its effective value;
// numeric-looking values are stored as numbers.
Json resolved_config(const CLI::App& sub);

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  Json config;
  std::uint64_t seed = 0;
  std::vector<std::string> artifacts;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  // Writes manifest.json into dir.
  void write(const std::filesystem::path& dir) const;
};

// Triplet file, or dense CSV when format is "csv" (or "auto" with a .csv
// extension). Warns on stderr about empty documents.
SparseDocTermMatrix load_matrix(const std::filesystem::path& path,
                                const std::string& format, bool label_column);

void ensure_dir(const std::filesystem::path& dir);

}  // namespace deepmou::cli
