#include "cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "zicure/csv.hpp"

namespace zicure::cli {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 4> kBlockKeys = {"gamma0", "gamma1", "shape", "scale"};

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : object.items()) {
    if (known.count(item.key()) == 0) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

DesignConfig::BlockConfig parse_block(const json& value, const std::string& where) {
  DesignConfig::BlockConfig block;
  if (value.is_boolean()) {
    block.enabled = value.get<bool>();
    block.all_columns = false;
    return block;
  }
  if (value.is_array()) {
    block.all_columns = false;
    block.columns = value.get<std::vector<std::string>>();
    return block;
  }
  if (value.is_object()) {
    reject_unknown_keys(value, {"enabled", "columns"}, where);
    if (value.contains("enabled")) block.enabled = value.at("enabled").get<bool>();
    if (value.contains("columns")) {
      block.all_columns = false;
      block.columns = value.at("columns").get<std::vector<std::string>>();
    } else {
      block.all_columns = false;
    }
    return block;
  }
  throw ConfigError(where + " must be a boolean, an array of column names, or an object");
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }

  RunConfig config;
  try {
    reject_unknown_keys(root,
                        {"seed", "scenario", "n", "replications", "sample_sizes", "horizons",
                         "threads", "root_method", "design", "categoricals", "controls",
                         "init", "coefficients", "covariates", "strata"},
                        "config");
    if (root.contains("seed")) config.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("scenario")) config.scenario = root.at("scenario").get<int>();
    if (root.contains("n")) config.n = root.at("n").get<std::size_t>();
    if (root.contains("replications")) {
      config.replications = root.at("replications").get<std::size_t>();
    }
    if (root.contains("sample_sizes")) {
      config.sample_sizes = root.at("sample_sizes").get<std::vector<std::size_t>>();
    }
    if (root.contains("horizons")) {
      config.horizons = root.at("horizons").get<std::vector<double>>();
    }
    if (root.contains("threads")) config.threads = root.at("threads").get<unsigned>();
    if (root.contains("root_method")) {
      const auto method = root.at("root_method").get<std::string>();
      if (method != "closed-form" && method != "bisection") {
        throw ConfigError("root_method must be 'closed-form' or 'bisection', got '" + method +
                          "'");
      }
      config.root_method = method;
    }
    if (root.contains("design")) {
      const json& design = root.at("design");
      reject_unknown_keys(design, {kBlockKeys.begin(), kBlockKeys.end()}, "design");
      config.design.present = true;
      for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
        if (design.contains(kBlockKeys[b])) {
          config.design.blocks[b] =
              parse_block(design.at(kBlockKeys[b]), std::string("design.") + kBlockKeys[b]);
        } else {
          config.design.blocks[b].enabled = true;
          config.design.blocks[b].all_columns = true;
        }
      }
    }
    if (root.contains("categoricals")) {
      for (const json& entry : root.at("categoricals")) {
        reject_unknown_keys(entry, {"column", "levels"}, "categoricals entry");
        CategoricalSpec spec;
        spec.column = entry.at("column").get<std::string>();
        spec.levels = entry.at("levels").get<std::vector<double>>();
        if (spec.levels.size() < 2) {
          throw ConfigError("categorical '" + spec.column + "' needs at least 2 levels");
        }
        std::set<double> distinct(spec.levels.begin(), spec.levels.end());
        if (distinct.size() != spec.levels.size()) {
          throw ConfigError("categorical '" + spec.column + "' lists a level twice");
        }
        config.categoricals.push_back(std::move(spec));
      }
    }
    if (root.contains("controls")) {
      const json& controls = root.at("controls");
      reject_unknown_keys(
          controls,
          {"max_iterations", "gradient_tol", "objective_tol", "armijo_c1", "fd_step"},
          "controls");
      if (controls.contains("max_iterations")) {
        config.controls.max_iterations = controls.at("max_iterations").get<int>();
      }
      if (controls.contains("gradient_tol")) {
        config.controls.gradient_tol = controls.at("gradient_tol").get<double>();
      }
      if (controls.contains("objective_tol")) {
        config.controls.objective_tol = controls.at("objective_tol").get<double>();
      }
      if (controls.contains("armijo_c1")) {
        config.controls.armijo_c1 = controls.at("armijo_c1").get<double>();
      }
      if (controls.contains("fd_step")) {
        config.controls.fd_step = controls.at("fd_step").get<double>();
      }
      try {
        config.controls.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("controls: ") + e.what());
      }
    }
    if (root.contains("init")) {
      const auto values = root.at("init").get<std::vector<double>>();
      Eigen::VectorXd init(static_cast<int>(values.size()));
      for (std::size_t i = 0; i < values.size(); ++i) init[static_cast<int>(i)] = values[i];
      config.init = init;
    }
    if (root.contains("coefficients")) {
      const json& coefficients = root.at("coefficients");
      reject_unknown_keys(coefficients, {kBlockKeys.begin(), kBlockKeys.end()},
                          "coefficients");
      for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
        if (coefficients.contains(kBlockKeys[b])) {
          config.coefficients[b] = coefficients.at(kBlockKeys[b]).get<std::vector<double>>();
        }
      }
    }
    if (root.contains("covariates")) {
      for (const json& entry : root.at("covariates")) {
        reject_unknown_keys(entry, {"name", "kind", "p", "lo", "hi"}, "covariates entry");
        CovariateSpec spec;
        spec.name = entry.at("name").get<std::string>();
        spec.kind = entry.at("kind").get<std::string>();
        if (spec.kind == "bernoulli") {
          if (entry.contains("p")) spec.p = entry.at("p").get<double>();
          if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
            throw ConfigError("covariate '" + spec.name + "': p must lie in [0, 1]");
          }
        } else if (spec.kind == "uniform") {
          if (entry.contains("lo")) spec.lo = entry.at("lo").get<double>();
          if (entry.contains("hi")) spec.hi = entry.at("hi").get<double>();
          if (!(spec.lo < spec.hi)) {
            throw ConfigError("covariate '" + spec.name + "': lo must be below hi");
          }
        } else {
          throw ConfigError("covariate '" + spec.name + "': kind must be 'bernoulli' or 'uniform'");
        }
        config.covariates.push_back(std::move(spec));
      }
    }
    if (root.contains("strata")) {
      for (const json& entry : root.at("strata")) {
        reject_unknown_keys(entry, {"label", "column", "value"}, "strata entry");
        StratumConfig stratum;
        stratum.column = entry.at("column").get<std::string>();
        stratum.value = entry.at("value").get<double>();
        stratum.label = entry.contains("label") ? entry.at("label").get<std::string>()
                                                : dummy_name(stratum.column, stratum.value);
        config.strata.push_back(std::move(stratum));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return config;
}

std::string dummy_name(const std::string& column, double level) {
  return column + "=" + format_double(level);
}

Dataset expand_categoricals(const Dataset& raw, const std::vector<CategoricalSpec>& cats) {
  if (cats.empty()) return raw;

  // Map each raw column to the expanded columns it produces.
  std::vector<const CategoricalSpec*> cat_of(raw.covariate_names.size(), nullptr);
  for (const CategoricalSpec& cat : cats) {
    const auto it =
        std::find(raw.covariate_names.begin(), raw.covariate_names.end(), cat.column);
    if (it == raw.covariate_names.end()) {
      throw ValidationError("categorical column '" + cat.column + "' is not in the data");
    }
    cat_of[static_cast<std::size_t>(it - raw.covariate_names.begin())] = &cat;
  }

  Dataset out;
  for (std::size_t j = 0; j < raw.covariate_names.size(); ++j) {
    if (cat_of[j] == nullptr) {
      out.covariate_names.push_back(raw.covariate_names[j]);
    } else {
      // Reference level is the last one listed; it gets no indicator.
      const CategoricalSpec& cat = *cat_of[j];
      for (std::size_t l = 0; l + 1 < cat.levels.size(); ++l) {
        out.covariate_names.push_back(dummy_name(cat.column, cat.levels[l]));
      }
    }
  }

  out.observations.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Observation& obs = raw.observations[i];
    Observation expanded;
    expanded.time = obs.time;
    expanded.event = obs.event;
    expanded.covariates.resize(static_cast<int>(out.covariate_names.size()));
    int at = 0;
    for (std::size_t j = 0; j < raw.covariate_names.size(); ++j) {
      const double value = obs.covariates[static_cast<int>(j)];
      if (cat_of[j] == nullptr) {
        expanded.covariates[at++] = value;
        continue;
      }
      const CategoricalSpec& cat = *cat_of[j];
      const auto level = std::find(cat.levels.begin(), cat.levels.end(), value);
      if (level == cat.levels.end()) {
        throw ValidationError("record " + std::to_string(i + 1) + ": column '" + cat.column +
                              "' has value " + format_double(value) +
                              " which is not a declared level");
      }
      for (std::size_t l = 0; l + 1 < cat.levels.size(); ++l) {
        expanded.covariates[at++] = cat.levels[l] == value ? 1.0 : 0.0;
      }
    }
    out.observations.push_back(std::move(expanded));
  }
  return out;
}

namespace {

std::vector<int> resolve_columns(const std::vector<std::string>& requested,
                                 const std::vector<std::string>& columns,
                                 const std::vector<CategoricalSpec>& cats,
                                 const std::string& where) {
  std::vector<int> out;
  for (const std::string& name : requested) {
    const auto cat = std::find_if(cats.begin(), cats.end(), [&](const CategoricalSpec& c) {
      return c.column == name;
    });
    std::vector<std::string> targets;
    if (cat != cats.end()) {
      for (std::size_t l = 0; l + 1 < cat->levels.size(); ++l) {
        targets.push_back(dummy_name(cat->column, cat->levels[l]));
      }
    } else {
      targets.push_back(name);
    }
    for (const std::string& target : targets) {
      const auto it = std::find(columns.begin(), columns.end(), target);
      if (it == columns.end()) {
        throw ConfigError(where + ": column '" + target + "' is not in the data");
      }
      out.push_back(static_cast<int>(it - columns.begin()));
    }
  }
  return out;
}

}  // namespace

DesignSpec resolve_design(const DesignConfig& config, const std::vector<std::string>& columns,
                          const std::vector<CategoricalSpec>& cats) {
  if (!config.present) {
    return DesignSpec::saturated(static_cast<int>(columns.size()));
  }
  DesignSpec spec;
  for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
    const DesignConfig::BlockConfig& block = config.blocks[b];
    BlockSpec& target = spec.blocks[b];
    target.enabled = block.enabled;
    if (!block.enabled) continue;
    if (block.all_columns) {
      target.columns.resize(columns.size());
      for (std::size_t j = 0; j < columns.size(); ++j) {
        target.columns[j] = static_cast<int>(j);
      }
    } else {
      target.columns = resolve_columns(block.columns, columns, cats,
                                       std::string("design.") + kBlockKeys[b]);
    }
  }
  if (spec.n_params() == 0) {
    throw ConfigError("design disables every block; nothing to fit");
  }
  return spec;
}

std::vector<std::pair<std::string, Eigen::VectorXd>> report_profiles(
    const std::vector<std::string>& columns, const std::vector<CategoricalSpec>& cats) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> profiles;
  const int width = static_cast<int>(columns.size());
  if (cats.empty()) {
    profiles.emplace_back("baseline", Eigen::VectorXd::Zero(width));
    return profiles;
  }
  const CategoricalSpec& cat = cats.front();
  for (double level : cat.levels) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(width);
    const std::string name = dummy_name(cat.column, level);
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it != columns.end()) {
      row[static_cast<int>(it - columns.begin())] = 1.0;
    }
    profiles.emplace_back(dummy_name(cat.column, level), std::move(row));
  }
  return profiles;
}

SimulationConfig custom_simulation(const RunConfig& config) {
  if (config.covariates.empty()) {
    throw ConfigError("custom simulation needs a 'covariates' list in the config");
  }
  SimulationConfig sim;
  for (const CovariateSpec& spec : config.covariates) {
    sim.covariate_names.push_back(spec.name);
  }
  sim.design = resolve_design(config.design, sim.covariate_names, {});
  for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
    const Block block = static_cast<Block>(b);
    const int length = sim.design.block_length(block);
    if (!config.coefficients[b].has_value()) {
      if (length > 0) {
        throw ConfigError(std::string("custom simulation is missing coefficients for block '") +
                          kBlockKeys[b] + "'");
      }
      sim.coefficients[block] = Eigen::VectorXd();
      continue;
    }
    const std::vector<double>& values = *config.coefficients[b];
    if (static_cast<int>(values.size()) != length) {
      throw ConfigError(std::string("coefficients for block '") + kBlockKeys[b] + "' have length " +
                        std::to_string(values.size()) + ", design expects " +
                        std::to_string(length));
    }
    Eigen::VectorXd beta(length);
    for (int j = 0; j < length; ++j) beta[j] = values[static_cast<std::size_t>(j)];
    sim.coefficients[block] = beta;
  }
  std::vector<CovariateSpec> specs = config.covariates;
  sim.sampler = [specs](Rng& rng) {
    Eigen::VectorXd row(static_cast<int>(specs.size()));
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const CovariateSpec& spec = specs[j];
      row[static_cast<int>(j)] = spec.kind == "bernoulli"
                                     ? (rng.bernoulli(spec.p) ? 1.0 : 0.0)
                                     : rng.uniform(spec.lo, spec.hi);
    }
    return row;
  };
  if (config.root_method.has_value() && *config.root_method == "bisection") {
    sim.root_method = RootMethod::kBisection;
  }
  return sim;
}

std::string config_fingerprint(const nlohmann::ordered_json& effective) {
  return fnv1a64_hex(effective.dump());
}

}  // namespace zicure::cli
