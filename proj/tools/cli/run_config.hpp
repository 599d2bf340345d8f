#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "zicure/dataset.hpp"
#include "zicure/links.hpp"
#include "zicure/optimizer.hpp"
#include "zicure/simulate.hpp"

namespace zicure::cli {

// Configuration problems are usage errors (exit code 1), as opposed to
// data validation problems (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A categorical covariate declaration. The last listed level is the
// reference; the others expand to indicator columns named
// "<column>=<level>". Levels are matched as exact doubles.
struct CategoricalSpec {
  std::string column;
  std::vector<double> levels;
};

// Design given by column names (resolved against the expanded covariate
// list). A name that matches a declared categorical stands for all of its
// indicator columns.
struct DesignConfig {
  struct BlockConfig {
    bool enabled = true;
    bool all_columns = true;  // default: every expanded covariate
    std::vector<std::string> columns;
  };
  bool present = false;
  std::array<BlockConfig, 4> blocks;
};

// Covariate sampler declaration for custom simulations.
struct CovariateSpec {
  std::string name;
  std::string kind;  // "bernoulli" or "uniform"
  double p = 0.5;
  double lo = 0.0;
  double hi = 1.0;
};

struct StratumConfig {
  std::string label;
  std::string column;
  double value = 0.0;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<int> scenario;
  std::optional<std::size_t> n;
  std::optional<std::size_t> replications;
  std::vector<std::size_t> sample_sizes;
  std::vector<double> horizons;
  std::optional<unsigned> threads;
  std::optional<std::string> root_method;  // "closed-form" or "bisection"
  DesignConfig design;
  std::vector<CategoricalSpec> categoricals;
  OptControls controls;
  std::optional<Eigen::VectorXd> init;
  // Custom simulation coefficients per block, packed intercept-first.
  std::array<std::optional<std::vector<double>>, 4> coefficients;
  std::vector<CovariateSpec> covariates;
  std::vector<StratumConfig> strata;
};

// Parses the JSON config file; unknown keys are rejected so typos fail
// loudly. Throws ConfigError on parse or type problems.
RunConfig load_config(const std::filesystem::path& path);

// Replaces declared categorical columns by their indicator columns, in
// place in the column order. Unknown levels raise ValidationError naming
// the record; a declared column missing from the data raises ConfigError.
Dataset expand_categoricals(const Dataset& raw, const std::vector<CategoricalSpec>& cats);

// Resolves a by-name design against the expanded column list; an absent
// design means saturated. Throws ConfigError for unknown column names.
DesignSpec resolve_design(const DesignConfig& config, const std::vector<std::string>& columns,
                          const std::vector<CategoricalSpec>& cats);

// Representative covariate rows for reporting: one per level of the first
// declared categorical (other covariates at zero), or a single all-zero
// "baseline" profile when no categorical is declared.
std::vector<std::pair<std::string, Eigen::VectorXd>> report_profiles(
    const std::vector<std::string>& columns, const std::vector<CategoricalSpec>& cats);

// Builds a custom simulation config from declared covariates,
// coefficients and (optionally) a design.
SimulationConfig custom_simulation(const RunConfig& config);

// Short fingerprint of the effective settings of one run, embedded in
// output headers so reruns are attributable and byte-identical.
std::string config_fingerprint(const nlohmann::ordered_json& effective);

// Indicator column name for one categorical level, e.g. "x=2".
std::string dummy_name(const std::string& column, double level);

}  // namespace zicure::cli
