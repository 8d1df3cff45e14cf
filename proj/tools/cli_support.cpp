#include "cli_support.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "deep_mou/chain_io.hpp"

namespace deepmou::cli {

namespace {

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  for (std::size_t a = 1; a < args.size(); ++a) {
    if (args[a] == "--config" && a + 1 < args.size()) {
      config_path = args[a + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(a),
                 args.begin() + static_cast<std::ptrdiff_t>(a + 2));
      break;
    }
    if (args[a].rfind("--config=", 0) == 0) {
      config_path = args[a].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(a));
      break;
    }
  }
  if (config_path.empty()) return args;

  Json cfg = read_json(config_path);
  if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];
  if (!cfg.is_object()) throw std::runtime_error(config_path + ": expected a JSON object");

  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag_name(key));
      continue;
    }
    extra.push_back(flag_name(key));
    if (value.is_array()) {
      for (const auto& v : value) extra.push_back(scalar_text(v));
    } else {
      extra.push_back(scalar_text(value));
    }
  }
  // Insert after the program name and subcommand.
  const std::size_t at = args.size() > 1 ? 2 : 1;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

unsigned default_threads() {
  if (const char* env = std::getenv("DEEP_MOU_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring DEEP_MOU_THREADS='" << env << "'\n";
  }
  return 1;
}

Json resolved_config(const CLI::App& sub) {
  Json out = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "help-all" || name == "config" || name.empty()) continue;
    std::string text;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.empty()) continue;
      if (opt->get_expected_max() == 0) {
        out[name] = true;
        continue;
      }
      text = results.back();
    } else {
      text = opt->get_default_str();
      if (opt->get_expected_max() == 0) {
        out[name] = false;
        continue;
      }
      if (text.empty()) continue;
    }
    Json parsed = Json::parse(text, nullptr, false);
    out[name] = parsed.is_number() ? parsed : Json(text);
  }
  return out;
}

void Manifest::write(const std::filesystem::path& dir) const {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json j{{"command", command},
         {"argv", argv},
         {"config", config},
         {"seed", seed},
         {"duration_seconds", seconds},
         {"artifacts", artifacts},
         {"version", DEEP_MOU_VERSION}};
  write_json(dir / "manifest.json", j);
}

SparseDocTermMatrix load_matrix(const std::filesystem::path& path,
                                const std::string& format, bool label_column) {
  const bool csv = format == "csv" || (format == "auto" && path.extension() == ".csv");
  SparseDocTermMatrix x =
      csv ? load_dense_csv(path, label_column).first : load_triplets(path);
  const auto empty = x.empty_documents();
  if (!empty.empty()) {
    std::cerr << "warning: " << empty.size() << " of " << x.n_docs()
              << " documents are empty (first: " << empty.front() << ")\n";
  }
  return x;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
}

}  // namespace deepmou::cli
