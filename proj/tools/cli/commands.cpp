#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cli/model_file.hpp"
#include "cli/run_config.hpp"
#include "zicure/csv.hpp"
#include "zicure/kaplan_meier.hpp"
#include "zicure/likelihood.hpp"
#include "zicure/montecarlo.hpp"
#include "zicure/version.hpp"

namespace zicure::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::array<const char*, 4> kBlockKeys = {"gamma0", "gamma1", "shape", "scale"};

RunConfig maybe_config(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  return out;
}

// "<dir>/<stem><suffix>" next to the main output file.
std::string sibling_path(const std::string& out, const std::string& suffix) {
  const std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::vector<std::string> meta_comments(const std::string& command,
                                       std::optional<std::uint64_t> seed,
                                       const std::string& hash) {
  std::vector<std::string> comments = {std::string("zicure ") + kVersion,
                                       "command: " + command};
  if (seed.has_value()) comments.push_back("seed: " + std::to_string(*seed));
  comments.push_back("config: " + hash);
  return comments;
}

ordered_json design_to_json(const DesignSpec& spec) {
  ordered_json out;
  for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
    out[kBlockKeys[b]] = {{"enabled", spec.blocks[b].enabled},
                          {"columns", spec.blocks[b].columns}};
  }
  return out;
}

ordered_json categoricals_to_json(const std::vector<CategoricalSpec>& cats) {
  ordered_json out = ordered_json::array();
  for (const CategoricalSpec& cat : cats) {
    out.push_back({{"column", cat.column}, {"levels", cat.levels}});
  }
  return out;
}

ordered_json controls_to_json(const OptControls& controls) {
  return {{"max_iterations", controls.max_iterations},
          {"gradient_tol", controls.gradient_tol},
          {"objective_tol", controls.objective_tol},
          {"armijo_c1", controls.armijo_c1},
          {"fd_step", controls.fd_step}};
}

void require_finite_horizons(const std::vector<double>& horizons, const char* flag) {
  for (double h : horizons) {
    if (!std::isfinite(h) || h < 0.0) {
      throw ConfigError(std::string(flag) + " values must be finite and nonnegative, got " +
                        format_double(h));
    }
  }
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  const RunConfig config = maybe_config(args.config_path);
  const std::optional<int> scenario = args.scenario.has_value() ? args.scenario
                                                                : config.scenario;
  const std::optional<std::size_t> n = args.n.has_value() ? args.n : config.n;
  const std::uint64_t seed = args.seed.has_value() ? *args.seed : config.seed.value_or(0);
  if (!n.has_value()) {
    throw ConfigError("simulate requires --n (or 'n' in the config)");
  }

  SimulationConfig sim;
  ordered_json effective;
  effective["command"] = "simulate";
  if (scenario.has_value()) {
    sim = scenario_preset(*scenario);
    effective["scenario"] = *scenario;
  } else {
    sim = custom_simulation(config);
    effective["design"] = design_to_json(sim.design);
    ordered_json coefficients;
    for (std::size_t b = 0; b < kBlockKeys.size(); ++b) {
      coefficients[kBlockKeys[b]] = config.coefficients[b].has_value()
                                        ? ordered_json(*config.coefficients[b])
                                        : ordered_json(nullptr);
    }
    effective["coefficients"] = coefficients;
    ordered_json covariates = ordered_json::array();
    for (const CovariateSpec& spec : config.covariates) {
      if (spec.kind == "bernoulli") {
        covariates.push_back({{"name", spec.name}, {"kind", spec.kind}, {"p", spec.p}});
      } else {
        covariates.push_back(
            {{"name", spec.name}, {"kind", spec.kind}, {"lo", spec.lo}, {"hi", spec.hi}});
      }
    }
    effective["covariates"] = covariates;
  }
  if (config.root_method.has_value() && *config.root_method == "bisection") {
    sim.root_method = RootMethod::kBisection;
  }
  sim.n = *n;
  sim.seed = seed;
  effective["n"] = *n;
  effective["seed"] = seed;
  effective["root_method"] =
      sim.root_method == RootMethod::kBisection ? "bisection" : "closed-form";

  const SimulationResult result = simulate_dataset(sim);
  std::vector<std::string> labels;
  labels.reserve(result.diagnostics.labels.size());
  for (SubjectClass c : result.diagnostics.labels) labels.emplace_back(to_string(c));

  std::ofstream out = open_output(args.out);
  write_dataset_csv(out, result.data,
                    meta_comments("simulate", seed, config_fingerprint(effective)), &labels,
                    args.out);
  return 0;
}

namespace {

void write_fit_report(std::ostream& out, const ModelFile& model,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& profiles) {
  const FitResult& fit = model.fit;
  out << "# zicure " << kVersion << '\n';
  out << "# command: fit\n";
  out << "# config: " << model.config_hash << '\n';
  out << "n = " << fit.n_observations << ", parameters = " << fit.spec.n_params() << '\n';
  out << std::fixed << std::setprecision(6);
  out << "log-likelihood = " << fit.loglik << '\n';
  out << "converged: " << (fit.converged ? "yes" : "NO") << " (" << to_string(fit.termination)
      << " after " << fit.iterations << " iterations, |score|_inf = " << std::scientific
      << std::setprecision(3) << fit.gradient_inf_norm << std::fixed << std::setprecision(6)
      << ")\n\n";

  out << std::left << std::setw(18) << "parameter" << std::right << std::setw(14) << "estimate"
      << std::setw(14) << "se" << std::setw(14) << "|est|/se" << '\n';
  for (int j = 0; j < fit.estimates.size(); ++j) {
    out << std::left << std::setw(18) << fit.parameter_names[static_cast<std::size_t>(j)]
        << std::right << std::setw(14) << fit.estimates[j];
    if (fit.covariance_available && std::isfinite(fit.se[j])) {
      out << std::setw(14) << fit.se[j] << std::setw(14) << fit.z[j] << '\n';
    } else {
      out << std::setw(14) << "n/a" << std::setw(14) << "n/a" << '\n';
    }
  }

  out << "\nlinked parameters by profile:\n";
  out << std::left << std::setw(12) << "profile" << std::right << std::setw(12) << "gamma0"
      << std::setw(12) << "gamma1" << std::setw(12) << "shape" << std::setw(12) << "scale"
      << '\n';
  for (const auto& [label, row] : profiles) {
    const SubjectParams sp = link(fit.coefficients, row, fit.spec);
    out << std::left << std::setw(12) << label << std::right << std::setw(12) << sp.gamma0
        << std::setw(12) << sp.gamma1 << std::setw(12) << sp.shape << std::setw(12) << sp.scale
        << '\n';
  }
}

}  // namespace

int cmd_fit(const FitArgs& args) {
  const RunConfig config = maybe_config(args.config_path);
  const Dataset raw = read_dataset_csv(args.data);
  const Dataset expanded = expand_categoricals(raw, config.categoricals);
  const DesignSpec design =
      resolve_design(config.design, expanded.covariate_names, config.categoricals);

  FitOptions options;
  options.controls = config.controls;
  options.init = config.init;

  ordered_json effective;
  effective["command"] = "fit";
  effective["categoricals"] = categoricals_to_json(config.categoricals);
  effective["design"] = design_to_json(design);
  effective["controls"] = controls_to_json(config.controls);
  if (config.init.has_value()) {
    std::vector<double> init(config.init->begin(), config.init->end());
    effective["init"] = init;
  } else {
    effective["init"] = nullptr;
  }

  ModelFile model;
  model.columns = expanded.covariate_names;
  model.categoricals = config.categoricals;
  model.config_hash = config_fingerprint(effective);
  model.fit = fit(expanded, design, options);

  save_model(args.out, model);
  const std::string report_path =
      args.report.empty() ? sibling_path(args.out, "_report.txt") : args.report;
  std::ofstream report = open_output(report_path);
  write_fit_report(report, model, report_profiles(expanded.covariate_names, config.categoricals));
  if (!report) {
    throw std::runtime_error("failed while writing '" + report_path + "'");
  }
  return model.fit.converged ? 0 : 3;
}

int cmd_mc_study(const McStudyArgs& args) {
  const RunConfig config = maybe_config(args.config_path);
  StudyConfig study;
  if (args.scenario.has_value()) {
    study.scenario = *args.scenario;
  } else if (config.scenario.has_value()) {
    study.scenario = *config.scenario;
  } else {
    throw ConfigError("mc-study requires --scenario (or 'scenario' in the config)");
  }
  study.sample_sizes = !args.sizes.empty() ? args.sizes : config.sample_sizes;
  if (study.sample_sizes.empty()) {
    throw ConfigError("mc-study requires --n (or 'sample_sizes' in the config)");
  }
  study.replications = args.replications.has_value()
                           ? *args.replications
                           : config.replications.value_or(100);
  study.base_seed = args.seed.has_value() ? *args.seed : config.seed.value_or(0);
  study.threads = args.threads.has_value() ? *args.threads : config.threads.value_or(0);
  study.controls = config.controls;

  ordered_json effective;
  effective["command"] = "mc-study";
  effective["scenario"] = study.scenario;
  effective["sample_sizes"] = study.sample_sizes;
  effective["replications"] = study.replications;
  effective["seed"] = study.base_seed;
  effective["controls"] = controls_to_json(study.controls);
  const std::string hash = config_fingerprint(effective);

  const std::vector<CellSummary> cells = run_study(study);

  std::ofstream csv = open_output(args.out);
  const std::string table_path =
      args.table.empty() ? sibling_path(args.out, "_table.txt") : args.table;
  std::ofstream table = open_output(table_path);
  for (const std::string& line : meta_comments("mc-study", study.base_seed, hash)) {
    table << "# " << line << '\n';
  }
  emit_results(cells, csv, table, meta_comments("mc-study", study.base_seed, hash));
  if (!table) {
    throw std::runtime_error("failed while writing '" + table_path + "'");
  }

  const bool any_usable =
      std::any_of(cells.begin(), cells.end(), [](const CellSummary& c) { return c.used > 0; });
  return any_usable ? 0 : 3;
}

namespace {

struct Stratum {
  std::string label;
  StratumPredicate predicate;
  Eigen::VectorXd profile;  // in model-column space; empty when no model
};

int raw_column_index(const Dataset& data, const std::string& name) {
  const auto it =
      std::find(data.covariate_names.begin(), data.covariate_names.end(), name);
  if (it == data.covariate_names.end()) {
    throw ConfigError("stratum column '" + name + "' is not in the data");
  }
  return static_cast<int>(it - data.covariate_names.begin());
}

// Profile row in model-column space for "column == value", using the
// model's categorical declarations when the column is one.
Eigen::VectorXd stratum_profile(const ModelFile& model, const std::string& column,
                                double value) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<int>(model.columns.size()));
  const auto cat =
      std::find_if(model.categoricals.begin(), model.categoricals.end(),
                   [&](const CategoricalSpec& c) { return c.column == column; });
  std::string target;
  double fill = 1.0;
  if (cat != model.categoricals.end()) {
    target = dummy_name(column, value);  // reference level leaves all zeros
  } else {
    target = column;
    fill = value;
  }
  const auto it = std::find(model.columns.begin(), model.columns.end(), target);
  if (it != model.columns.end()) {
    row[static_cast<int>(it - model.columns.begin())] = fill;
  } else if (cat == model.categoricals.end()) {
    throw ConfigError("stratum column '" + column + "' is not among the model's columns");
  }
  return row;
}

std::vector<Stratum> build_strata(const Dataset& raw, const RunConfig& config,
                                  const ModelFile* model) {
  std::vector<Stratum> strata;
  if (!config.strata.empty()) {
    for (const StratumConfig& sc : config.strata) {
      const int col = raw_column_index(raw, sc.column);
      Stratum stratum;
      stratum.label = sc.label;
      const double value = sc.value;
      stratum.predicate = [col, value](const Observation& obs) {
        return obs.covariates[col] == value;
      };
      if (model != nullptr) stratum.profile = stratum_profile(*model, sc.column, value);
      strata.push_back(std::move(stratum));
    }
    return strata;
  }
  const std::vector<CategoricalSpec>& cats =
      !config.categoricals.empty() ? config.categoricals
                                   : (model != nullptr ? model->categoricals
                                                       : std::vector<CategoricalSpec>{});
  if (!cats.empty()) {
    const CategoricalSpec& cat = cats.front();
    const int col = raw_column_index(raw, cat.column);
    for (double level : cat.levels) {
      Stratum stratum;
      stratum.label = dummy_name(cat.column, level);
      stratum.predicate = [col, level](const Observation& obs) {
        return obs.covariates[col] == level;
      };
      if (model != nullptr) stratum.profile = stratum_profile(*model, cat.column, level);
      strata.push_back(std::move(stratum));
    }
    return strata;
  }
  Stratum all;
  all.label = "all";
  all.predicate = [](const Observation&) { return true; };
  if (model != nullptr) {
    all.profile = Eigen::VectorXd::Zero(static_cast<int>(model->columns.size()));
  }
  strata.push_back(std::move(all));
  return strata;
}

}  // namespace

int cmd_km(const KmArgs& args) {
  const RunConfig config = maybe_config(args.config_path);
  const Dataset raw = read_dataset_csv(args.data);

  std::optional<ModelFile> model;
  if (!args.model.empty()) model = load_model(args.model);

  double max_time = 0.0;
  for (const Observation& obs : raw.observations) max_time = std::max(max_time, obs.time);
  for (double g : args.grid) {
    if (!std::isfinite(g) || g < 0.0 || g > max_time) {
      throw ValidationError("grid time " + format_double(g) +
                            " lies outside the observed range [0, " + format_double(max_time) +
                            "]");
    }
  }

  const std::vector<Stratum> strata =
      build_strata(raw, config, model.has_value() ? &*model : nullptr);

  ordered_json effective;
  effective["command"] = "km";
  effective["model"] = model.has_value() ? ordered_json(model->config_hash)
                                         : ordered_json(nullptr);
  effective["grid"] = args.grid;
  ordered_json strata_json = ordered_json::array();
  for (const Stratum& s : strata) strata_json.push_back(s.label);
  effective["strata"] = strata_json;
  const std::string hash = config_fingerprint(effective);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  if (!model.has_value()) {
    header = {"stratum", "t", "at_risk", "events", "km_before", "km_after"};
    for (const Stratum& stratum : strata) {
      const KmCurve curve = km_estimate(raw, stratum.predicate, stratum.label);
      for (const KmPoint& p : curve.points) {
        rows.push_back({stratum.label, format_double(p.time), std::to_string(p.at_risk),
                        std::to_string(p.events), format_double(p.survival_before),
                        format_double(p.survival_after)});
      }
    }
  } else {
    header = {"stratum", "t", "km_surv", "fitted_surv"};
    for (const Stratum& stratum : strata) {
      const KmCurve curve = km_estimate(raw, stratum.predicate, stratum.label);
      std::set<double> grid = {0.0};
      for (const KmPoint& p : curve.points) grid.insert(p.time);
      for (double g : args.grid) grid.insert(g);
      const SubjectParams sp = link(model->fit.coefficients, stratum.profile, model->fit.spec);
      const MixtureParams mix{sp.gamma0, sp.gamma1, WeibullParams{sp.shape, sp.scale}};
      for (double t : grid) {
        rows.push_back({stratum.label, format_double(t), format_double(curve.survival_at(t)),
                        format_double(mixture_survival(t, mix))});
      }
    }
  }

  std::ofstream out = open_output(args.out);
  write_csv(out, meta_comments("km", std::nullopt, hash), header, rows, args.out);
  return 0;
}

int cmd_score(const ScoreArgs& args) {
  const RunConfig config = maybe_config(args.config_path);
  const ModelFile model = load_model(args.model);
  const Dataset raw = read_dataset_csv(args.data);
  const Dataset expanded = expand_categoricals(raw, model.categoricals);
  if (expanded.covariate_names != model.columns) {
    std::string have;
    for (const std::string& name : expanded.covariate_names) {
      have += have.empty() ? name : ", " + name;
    }
    std::string want;
    for (const std::string& name : model.columns) {
      want += want.empty() ? name : ", " + name;
    }
    throw ValidationError("data columns after categorical expansion (" + have +
                          ") do not match the model's columns (" + want + ")");
  }

  std::vector<double> horizons = !args.horizons.empty() ? args.horizons : config.horizons;
  require_finite_horizons(horizons, "--horizons");
  std::sort(horizons.begin(), horizons.end());

  ordered_json effective;
  effective["command"] = "score";
  effective["model"] = model.config_hash;
  effective["horizons"] = horizons;
  const std::string hash = config_fingerprint(effective);

  std::vector<std::string> header = {"t", "delta"};
  header.insert(header.end(), raw.covariate_names.begin(), raw.covariate_names.end());
  header.insert(header.end(), {"gamma0", "gamma1", "shape", "scale"});
  for (double h : horizons) header.push_back("surv_" + format_double(h));

  std::vector<std::vector<std::string>> rows;
  rows.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Observation& obs = raw.observations[i];
    const SubjectParams sp =
        link(model.fit.coefficients, expanded.observations[i].covariates, model.fit.spec);
    const MixtureParams mix{sp.gamma0, sp.gamma1, WeibullParams{sp.shape, sp.scale}};
    std::vector<std::string> row;
    row.reserve(header.size());
    row.push_back(format_double(obs.time));
    row.push_back(std::to_string(obs.event));
    for (int j = 0; j < obs.covariates.size(); ++j) {
      row.push_back(format_double(obs.covariates[j]));
    }
    row.push_back(format_double(sp.gamma0));
    row.push_back(format_double(sp.gamma1));
    row.push_back(format_double(sp.shape));
    row.push_back(format_double(sp.scale));
    for (double h : horizons) row.push_back(format_double(mixture_survival(h, mix)));
    rows.push_back(std::move(row));
  }

  std::ofstream out = open_output(args.out);
  write_csv(out, meta_comments("score", std::nullopt, hash), header, rows, args.out);
  return 0;
}

}  // namespace zicure::cli
