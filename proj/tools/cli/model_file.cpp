#include "cli/model_file.hpp"

#include <array>
#include <fstream>
#include <limits>

#include "zicure/version.hpp"

namespace zicure::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::array<const char*, 4> kBlockKeys = {"gamma0", "gamma1", "shape", "scale"};

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& array) {
  Eigen::VectorXd out(static_cast<int>(array.size()));
  int i = 0;
  for (const auto& value : array) out[i++] = value.get<double>();
  return out;
}

Termination termination_from_string(const std::string& name) {
  for (Termination t : {Termination::kGradient, Termination::kObjectiveChange,
                        Termination::kMaxIterations, Termination::kLineSearchFailure}) {
    if (name == to_string(t)) return t;
  }
  throw ConfigError("unknown termination reason '" + name + "' in model file");
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  ordered_json root;
  root["format"] = "zicure-model";
  root["version"] = kVersion;
  root["config"] = model.config_hash;
  root["columns"] = model.columns;
  root["categoricals"] = ordered_json::array();
  for (const CategoricalSpec& cat : model.categoricals) {
    root["categoricals"].push_back({{"column", cat.column}, {"levels", cat.levels}});
  }
  ordered_json design;
  for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
    const BlockSpec& block = model.fit.spec.blocks[b];
    design[kBlockKeys[b]] = {{"enabled", block.enabled}, {"columns", block.columns}};
  }
  root["design"] = design;
  root["parameter_names"] = model.fit.parameter_names;
  root["estimates"] = vector_to_json(model.fit.estimates);
  root["loglik"] = model.fit.loglik;
  root["converged"] = model.fit.converged;
  root["termination"] = to_string(model.fit.termination);
  root["iterations"] = model.fit.iterations;
  root["gradient_inf_norm"] = model.fit.gradient_inf_norm;
  root["n"] = model.fit.n_observations;
  if (model.fit.covariance_available) {
    root["se"] = vector_to_json(model.fit.se);
    root["z"] = vector_to_json(model.fit.z);
    ordered_json covariance = ordered_json::array();
    for (int i = 0; i < model.fit.covariance.rows(); ++i) {
      covariance.push_back(vector_to_json(model.fit.covariance.row(i)));
    }
    root["covariance"] = covariance;
  } else {
    root["se"] = nullptr;
    root["z"] = nullptr;
    root["covariance"] = nullptr;
  }

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << root.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("failed while writing '" + path.string() + "'");
  }
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open model file '" + path.string() + "'");
  }
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("model file '" + path.string() + "': " + e.what());
  }

  ModelFile model;
  try {
    if (root.value("format", "") != "zicure-model") {
      throw ConfigError("'" + path.string() + "' is not a zicure model file");
    }
    model.config_hash = root.value("config", "");
    model.columns = root.at("columns").get<std::vector<std::string>>();
    for (const auto& entry : root.at("categoricals")) {
      CategoricalSpec cat;
      cat.column = entry.at("column").get<std::string>();
      cat.levels = entry.at("levels").get<std::vector<double>>();
      model.categoricals.push_back(std::move(cat));
    }
    for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
      const nlohmann::json& block = root.at("design").at(kBlockKeys[b]);
      model.fit.spec.blocks[b].enabled = block.at("enabled").get<bool>();
      model.fit.spec.blocks[b].columns = block.at("columns").get<std::vector<int>>();
    }
    model.fit.spec.validate(static_cast<int>(model.columns.size()));
    model.fit.parameter_names = root.at("parameter_names").get<std::vector<std::string>>();
    model.fit.estimates = vector_from_json(root.at("estimates"));
    if (model.fit.estimates.size() != model.fit.spec.n_params()) {
      throw ConfigError("model file '" + path.string() + "': estimates length " +
                        std::to_string(model.fit.estimates.size()) +
                        " does not match the design (" +
                        std::to_string(model.fit.spec.n_params()) + ")");
    }
    model.fit.coefficients = unpack(model.fit.estimates, model.fit.spec);
    model.fit.loglik = root.at("loglik").get<double>();
    model.fit.converged = root.at("converged").get<bool>();
    model.fit.termination = termination_from_string(root.at("termination").get<std::string>());
    model.fit.iterations = root.at("iterations").get<int>();
    model.fit.gradient_inf_norm = root.at("gradient_inf_norm").get<double>();
    model.fit.n_observations = root.at("n").get<std::size_t>();
    model.fit.n_columns = static_cast<int>(model.columns.size());
    const int p = model.fit.spec.n_params();
    model.fit.se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    model.fit.z = model.fit.se;
    model.fit.covariance =
        Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    if (!root.at("covariance").is_null()) {
      model.fit.covariance_available = true;
      model.fit.se = vector_from_json(root.at("se"));
      model.fit.z = vector_from_json(root.at("z"));
      int i = 0;
      for (const auto& row : root.at("covariance")) {
        model.fit.covariance.row(i++) = vector_from_json(row);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model file '" + path.string() + "': " + e.what());
  }
  return model;
}

}  // namespace zicure::cli
