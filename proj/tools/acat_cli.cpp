// Batch runner for the named experiments. Talks to the library through the
// C API only.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acat/acat.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitUsage = 2;

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

bool split_pair(const std::string& arg, std::string& key, std::string& value) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) return false;
  key = arg.substr(0, eq);
  value = arg.substr(eq + 1);
  return true;
}

std::vector<std::string> recipes() {
  std::vector<std::string> out;
  for (std::size_t i = 0; const char* name = acat_recipe_name(i); ++i) out.emplace_back(name);
  return out;
}

int run(const std::string& recipe, const std::vector<std::string>& pairs, const std::string& config_file,
        const std::optional<std::uint64_t>& seed, const fs::path& out_dir) {
  // File first, command-line pairs win.
  std::string config;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) {
      std::cerr << "error: cannot read config file " << config_file << "\n";
      return kExitUsage;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    config = ss.str() + "\n";
  }
  for (const std::string& p : pairs) {
    std::string k, v;
    if (!split_pair(p, k, v)) {
      std::cerr << "error: expected key=value, got '" << p << "'\n";
      return kExitUsage;
    }
    config += k + "=" + v + "\n";
  }
  if (seed) config += "seed=" + std::to_string(*seed) + "\n";

  acat_run* result = nullptr;
  const acat_status status = acat_run_recipe(recipe.c_str(), config.c_str(), &result);
  if (status != ACAT_OK) {
    const bool usage = status == ACAT_E_USAGE || status == ACAT_E_DOMAIN || status == ACAT_E_UNSUPPORTED ||
                       status == ACAT_E_NULL;
    nlohmann::json err{{"recipe", recipe},
                       {"status", acat_status_name(status)},
                       {"message", acat_last_error()},
                       {"library_version", acat_version()}};
    std::cerr << err.dump() << "\n";
    if (!usage) {
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      write_file(out_dir / (recipe + ".error.json"), err.dump(2) + "\n");
    }
    return usage ? kExitUsage : kExitInvariant;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const fs::path csv = out_dir / (recipe + ".csv"), manifest = out_dir / (recipe + ".json");
  const bool ok = write_file(csv, acat_run_csv(result)) && write_file(manifest, acat_run_manifest(result));
  acat_run_free(result);
  if (!ok) {
    std::cerr << "error: cannot write to " << out_dir << "\n";
    return kExitUsage;
  }
  std::cout << csv.string() << "\n" << manifest.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(acat_version()));

  auto* list = app.add_subcommand("list", "Print the registered recipes");

  auto* run_cmd = app.add_subcommand("run", "Run a recipe; parameters as key=value pairs");
  std::string recipe, config_file, out_dir = ".";
  std::vector<std::string> pairs;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("recipe", recipe, "Recipe name")->required();
  run_cmd->add_option("params", pairs, "key=value parameters");
  run_cmd->add_option("--config", config_file, "Plain-text key=value file");
  run_cmd->add_option("--seed", seed, "Seed (overrides seed= in params)");
  run_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (list->parsed()) {
    for (const std::string& r : recipes()) std::cout << r << "\n";
    return kExitOk;
  }
  return run(recipe, pairs, config_file, seed, out_dir);
}
