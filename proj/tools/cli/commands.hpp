#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zicure::cli {

// Subcommand argument bundles, filled from flags by main(). Every command
// also accepts --config; explicit flags override config values.

struct SimulateArgs {
  std::string config_path;
  std::optional<int> scenario;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct FitArgs {
  std::string config_path;
  std::string data;
  std::string out;
  std::string report;  // derived from --out when empty
};

struct McStudyArgs {
  std::string config_path;
  std::optional<int> scenario;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> replications;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string table;  // derived from --out when empty
};

struct KmArgs {
  std::string config_path;
  std::string data;
  std::string model;  // optional: adds fitted survival overlay columns
  std::vector<double> grid;
  std::string out;
};

struct ScoreArgs {
  std::string config_path;
  std::string data;
  std::string model;
  std::vector<double> horizons;
  std::string out;
};

// Exit codes shared by all commands: 0 success, 1 usage/config error,
// 2 data validation error, 3 fit did not converge.
int cmd_simulate(const SimulateArgs& args);
int cmd_fit(const FitArgs& args);
int cmd_mc_study(const McStudyArgs& args);
int cmd_km(const KmArgs& args);
int cmd_score(const ScoreArgs& args);

}  // namespace zicure::cli
