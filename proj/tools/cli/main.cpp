#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "zicure/version.hpp"

namespace {

// Exit codes: 0 success, 1 usage/config error, 2 data validation error,
// 3 fit did not converge.
int dispatch(const CLI::App& app, const zicure::cli::SimulateArgs& simulate_args,
             const zicure::cli::FitArgs& fit_args, const zicure::cli::McStudyArgs& mc_args,
             const zicure::cli::KmArgs& km_args, const zicure::cli::ScoreArgs& score_args) {
  if (app.got_subcommand("simulate")) return zicure::cli::cmd_simulate(simulate_args);
  if (app.got_subcommand("fit")) return zicure::cli::cmd_fit(fit_args);
  if (app.got_subcommand("mc-study")) return zicure::cli::cmd_mc_study(mc_args);
  if (app.got_subcommand("km")) return zicure::cli::cmd_km(km_args);
  if (app.got_subcommand("score")) return zicure::cli::cmd_score(score_args);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-inflated Weibull cure-rate survival modeling"};
  app.set_version_flag("--version", std::string("zicure ") + zicure::kVersion);
  app.require_subcommand(1);

  zicure::cli::SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Draw a three-population dataset and write it as CSV");
  simulate->add_option("--config", simulate_args.config_path, "JSON config file");
  simulate->add_option("--scenario", simulate_args.scenario, "Preset scenario (1, 2 or 3)")
      ->check(CLI::Range(1, 3));
  simulate->add_option("--n", simulate_args.n, "Number of subjects");
  simulate->add_option("--seed", simulate_args.seed, "RNG seed");
  simulate->add_option("--out", simulate_args.out, "Output CSV path")->required();

  zicure::cli::FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit the cure-rate model to a dataset");
  fit->add_option("--config", fit_args.config_path, "JSON config file");
  fit->add_option("--data", fit_args.data, "Input dataset CSV")->required();
  fit->add_option("--out", fit_args.out, "Output model JSON path")->required();
  fit->add_option("--report", fit_args.report,
                  "Human-readable report path (default: <out>_report.txt)");

  zicure::cli::McStudyArgs mc_args;
  CLI::App* mc = app.add_subcommand(
      "mc-study", "Replicated simulate-and-fit study with RMSE/bias summaries");
  mc->add_option("--config", mc_args.config_path, "JSON config file");
  mc->add_option("--scenario", mc_args.scenario, "Preset scenario (1, 2 or 3)")
      ->check(CLI::Range(1, 3));
  mc->add_option("--n", mc_args.sizes, "Sample sizes, comma separated")->delimiter(',');
  mc->add_option("--replications", mc_args.replications, "Replications per sample size");
  mc->add_option("--seed", mc_args.seed, "Base RNG seed");
  mc->add_option("--threads", mc_args.threads, "Worker threads (0 = hardware)");
  mc->add_option("--out", mc_args.out, "Output CSV path")->required();
  mc->add_option("--table", mc_args.table,
                 "Human-readable table path (default: <out>_table.txt)");

  zicure::cli::KmArgs km_args;
  CLI::App* km = app.add_subcommand(
      "km", "Kaplan-Meier curves, optionally overlaid with a fitted model");
  km->add_option("--config", km_args.config_path, "JSON config file");
  km->add_option("--data", km_args.data, "Input dataset CSV")->required();
  km->add_option("--model", km_args.model, "Fitted model JSON for the overlay");
  km->add_option("--grid", km_args.grid, "Extra evaluation times, comma separated")
      ->delimiter(',');
  km->add_option("--out", km_args.out, "Output CSV path")->required();

  zicure::cli::ScoreArgs score_args;
  CLI::App* score = app.add_subcommand(
      "score", "Apply a fitted model to a dataset, record by record");
  score->add_option("--config", score_args.config_path, "JSON config file");
  score->add_option("--data", score_args.data, "Input dataset CSV")->required();
  score->add_option("--model", score_args.model, "Fitted model JSON")->required();
  score->add_option("--horizons", score_args.horizons, "Survival horizons, comma separated")
      ->delimiter(',');
  score->add_option("--out", score_args.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return dispatch(app, simulate_args, fit_args, mc_args, km_args, score_args);
  } catch (const zicure::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const zicure::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const zicure::SimulationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
