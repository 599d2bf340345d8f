#include "zicure/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "zicure/csv.hpp"

namespace zicure {

CellResult run_cell(const StudyConfig& config, std::size_t sample_size) {
  if (config.replications < 1) {
    throw std::invalid_argument("study requires at least one replication");
  }
  if (sample_size < 1) {
    throw std::invalid_argument("study sample size must be at least 1");
  }

  SimulationConfig base = scenario_preset(config.scenario);
  base.n = sample_size;
  const Eigen::VectorXd truth = pack(base.coefficients, base.design);
  const std::vector<std::string> names = base.design.parameter_names(base.covariate_names);
  const std::size_t reps = config.replications;

  CellResult out;
  out.replications.resize(reps);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      RepResult& rep = out.replications[r];
      rep.seed = config.base_seed ^ static_cast<std::uint64_t>(r);
      try {
        SimulationConfig sim_config = base;
        sim_config.seed = rep.seed;
        const SimulationResult sim = simulate_dataset(sim_config);
        rep.censored_rate = sim.diagnostics.censored_rate();
        FitOptions options;
        options.controls = config.controls;
        if (config.init_from_truth) options.init = truth;
        const FitResult fitted = fit(sim.data, base.design, options);
        rep.converged = fitted.converged;
        rep.estimates = fitted.estimates;
        rep.se = fitted.se;
      } catch (const std::exception& e) {
        rep.errored = true;
        rep.error = e.what();
      }
    }
  };

  unsigned n_threads = config.threads != 0 ? config.threads
                                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, reps));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }

  // Aggregate in replication order, independent of worker scheduling.
  CellSummary& summary = out.summary;
  summary.scenario = config.scenario;
  summary.sample_size = sample_size;
  summary.replications = reps;
  std::vector<std::size_t> used;
  used.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const RepResult& rep = out.replications[r];
    if (rep.errored || !rep.converged) {
      ++summary.excluded;
    } else {
      used.push_back(r);
    }
  }
  summary.used = used.size();

  const int p = static_cast<int>(truth.size());
  summary.parameters.resize(static_cast<std::size_t>(p));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < p; ++j) {
    ParamSummary& ps = summary.parameters[static_cast<std::size_t>(j)];
    ps.name = names[static_cast<std::size_t>(j)];
    ps.truth = truth[j];
    if (used.empty()) {
      ps.mlea = ps.rmse = ps.sd = ps.relative_bias = nan;
      continue;
    }
    const double count = static_cast<double>(used.size());
    double mean = 0.0;
    double sq_error = 0.0;
    for (std::size_t r : used) {
      const double est = out.replications[r].estimates[j];
      mean += est;
      sq_error += (est - ps.truth) * (est - ps.truth);
    }
    mean /= count;
    ps.mlea = mean;
    ps.rmse = std::sqrt(sq_error / count);
    double spread = 0.0;
    for (std::size_t r : used) {
      const double dev = out.replications[r].estimates[j] - mean;
      spread += dev * dev;
    }
    ps.sd = used.size() > 1 ? std::sqrt(spread / (count - 1.0)) : nan;
    ps.relative_bias = ps.truth != 0.0 ? (mean - ps.truth) / std::abs(ps.truth) : nan;
  }
  double rate = 0.0;
  for (std::size_t r : used) rate += out.replications[r].censored_rate;
  summary.mean_censored_rate = used.empty() ? nan : rate / static_cast<double>(used.size());
  return out;
}

std::vector<CellSummary> run_study(const StudyConfig& config) {
  if (config.sample_sizes.empty()) {
    throw std::invalid_argument("study requires at least one sample size");
  }
  std::vector<CellSummary> cells;
  cells.reserve(config.sample_sizes.size());
  for (std::size_t n : config.sample_sizes) {
    cells.push_back(run_cell(config, n).summary);
  }
  return cells;
}

void emit_results(const std::vector<CellSummary>& cells, std::ostream& csv_out,
                  std::ostream& table_out, const std::vector<std::string>& csv_comments) {
  std::vector<std::vector<std::string>> rows;
  for (const CellSummary& cell : cells) {
    for (const ParamSummary& ps : cell.parameters) {
      const auto push = [&](const char* metric, double value) {
        rows.push_back({std::to_string(cell.scenario), std::to_string(cell.sample_size),
                        ps.name, metric, format_double(value)});
      };
      push("rmse", ps.rmse);
      push("rel_bias", ps.relative_bias);
      push("sd", ps.sd);
    }
  }
  write_csv(csv_out, csv_comments, {"scenario", "n", "parameter", "metric", "value"}, rows,
            "study CSV");

  const auto previous_flags = table_out.flags();
  table_out << std::fixed << std::setprecision(4);
  for (const CellSummary& cell : cells) {
    table_out << "scenario " << cell.scenario << ", n = " << cell.sample_size
              << ", replications = " << cell.replications;
    if (cell.excluded > 0) table_out << " (" << cell.excluded << " excluded)";
    table_out << ", censored " << std::setprecision(2) << 100.0 * cell.mean_censored_rate
              << "%" << std::setprecision(4) << '\n';
    table_out << std::left << std::setw(18) << "parameter" << std::right << std::setw(10)
              << "true" << std::setw(10) << "MLEA" << std::setw(10) << "RMSE"
              << std::setw(10) << "SD" << '\n';
    for (const ParamSummary& ps : cell.parameters) {
      table_out << std::left << std::setw(18) << ps.name << std::right << std::setw(10)
                << ps.truth << std::setw(10) << ps.mlea << std::setw(10) << ps.rmse
                << std::setw(10) << ps.sd << '\n';
    }
    table_out << '\n';
  }
  table_out.flags(previous_flags);
  if (!table_out) {
    throw std::runtime_error("failed while writing study table");
  }
}

}  // namespace zicure
