#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cli/run_config.hpp"
#include "zicure/likelihood.hpp"

namespace zicure::cli {

// A fitted model plus everything needed to apply it to new data: the
// expanded covariate columns, the categorical declarations that produced
// them, and the design.
struct ModelFile {
  std::vector<std::string> columns;
  std::vector<CategoricalSpec> categoricals;
  FitResult fit;
  std::string config_hash;
};

// JSON round trip. save_model writes deterministically (fixed key order,
// shortest round-trip numbers); load_model throws ConfigError on missing
// or malformed fields.
void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace zicure::cli
