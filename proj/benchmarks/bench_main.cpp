// Microbenchmarks for the hot paths: survival functions, likelihood
// evaluation, full fits, and the data generator.
#include <benchmark/benchmark.h>

#include "zicure/likelihood.hpp"
#include "zicure/mixture.hpp"
#include "zicure/simulate.hpp"

using namespace zicure;

namespace {

Dataset make_data(int scenario, std::size_t n) {
  SimulationConfig config = scenario_preset(scenario);
  config.n = n;
  config.seed = 8675309;
  return simulate_dataset(config).data;
}

void bm_mixture_survival(benchmark::State& state) {
  const MixtureParams m{0.1, 0.3, {1.4, 5.0}};
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    if (t > 40.0) t = 0.0;
    benchmark::DoNotOptimize(mixture_survival(t, m));
  }
}
BENCHMARK(bm_mixture_survival);

void bm_weibull_quantile(benchmark::State& state) {
  const WeibullParams w{1.284, 2.718};
  double u = 0.0;
  for (auto _ : state) {
    u += 0.001;
    if (u >= 1.0) u = 0.0;
    benchmark::DoNotOptimize(weibull_quantile(u, w));
  }
}
BENCHMARK(bm_weibull_quantile);

void bm_loglik_eval(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Dataset data = make_data(2, n);
  const DesignSpec spec = DesignSpec::saturated(1);
  const LogLikelihood ll(data, spec);
  const Eigen::VectorXd theta =
      pack(scenario_preset(2).coefficients, scenario_preset(2).design);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ll(theta));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(bm_loglik_eval)->Arg(250)->Arg(2000)->Arg(20000);

void bm_score_fd(benchmark::State& state) {
  const Dataset data = make_data(2, 1000);
  const DesignSpec spec = DesignSpec::saturated(1);
  const LogLikelihood ll(data, spec);
  const Eigen::VectorXd theta =
      pack(scenario_preset(2).coefficients, scenario_preset(2).design);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ll.score_fd(theta));
  }
}
BENCHMARK(bm_score_fd);

void bm_fit(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Dataset data = make_data(2, n);
  const DesignSpec spec = DesignSpec::saturated(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(data, spec));
  }
}
BENCHMARK(bm_fit)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_simulate(benchmark::State& state) {
  SimulationConfig config = scenario_preset(2);
  config.n = static_cast<std::size_t>(state.range(0));
  config.seed = 4711;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_dataset(config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(bm_simulate)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
