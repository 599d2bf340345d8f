#include "zicure/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zicure/mixture.hpp"
#include "zicure/weibull.hpp"

namespace zicure {

const char* to_string(SubjectClass c) {
  switch (c) {
    case SubjectClass::kFraudster: return "fraudster";
    case SubjectClass::kSusceptible: return "susceptible";
    case SubjectClass::kCured: return "cured";
  }
  return "?";
}

double SimulationDiagnostics::censored_rate() const {
  if (labels.empty()) return 0.0;
  return 1.0 - static_cast<double>(n_events) / static_cast<double>(labels.size());
}

SimulationConfig scenario_preset(int scenario) {
  struct Preset {
    double b1[2], b2[2], b3[2], b4[2];
  };
  Preset preset;
  switch (scenario) {
    case 1:
      preset = {{-3.0, 1.0}, {-2.5, 0.3}, {0.5, 0.5}, {1.5, 2.0}};
      break;
    case 2:
      preset = {{-2.0, 2.0}, {-1.5, 1.5}, {-0.5, 1.5}, {-0.5, 3.0}};
      break;
    case 3:
      preset = {{-0.5, 0.75}, {-0.35, 1.75}, {-1.0, 2.0}, {1.25, 3.5}};
      break;
    default:
      throw std::invalid_argument("scenario must be 1, 2 or 3, got " +
                                  std::to_string(scenario));
  }

  SimulationConfig config;
  config.design = DesignSpec::saturated(1);
  config.covariate_names = {"x"};
  auto assign = [](Eigen::VectorXd& beta, const double (&values)[2]) {
    beta.resize(2);
    beta[0] = values[0];
    beta[1] = values[1];
  };
  assign(config.coefficients[Block::kGamma0], preset.b1);
  assign(config.coefficients[Block::kGamma1], preset.b2);
  assign(config.coefficients[Block::kShape], preset.b3);
  assign(config.coefficients[Block::kScale], preset.b4);
  config.sampler = [](Rng& rng) {
    Eigen::VectorXd row(1);
    row[0] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    return row;
  };
  return config;
}

namespace {

// Susceptible lifetime via bisection on the population CDF
// F(t) = gamma0 + (1 - gamma0 - gamma1) F_w(t) at level v. Used as a
// cross-check of the closed-form quantile.
double bisect_lifetime(double v, const SubjectParams& sp) {
  const MixtureParams mix{sp.gamma0, sp.gamma1, WeibullParams{sp.shape, sp.scale}};
  double hi = sp.scale;
  for (int i = 0; i < 200 && mixture_cdf(hi, mix) < v; ++i) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mixture_cdf(mid, mix) < v) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, lo)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SimulationResult simulate_dataset(const SimulationConfig& config) {
  if (config.n < 1) {
    throw std::invalid_argument("simulation requires n >= 1");
  }
  if (!config.sampler) {
    throw std::invalid_argument("simulation config has no covariate sampler");
  }
  config.design.validate(static_cast<int>(config.covariate_names.size()));

  Rng rng(config.seed);
  const std::size_t n = config.n;

  SimulationResult out;
  out.data.covariate_names = config.covariate_names;
  out.data.observations.resize(n);
  out.diagnostics.labels.resize(n);
  out.diagnostics.latent_time.resize(n);
  out.diagnostics.censor_time.resize(n);

  // Pass 1: covariates, class membership and latent lifetimes.
  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Observation& obs = out.data.observations[i];
    obs.covariates = config.sampler(rng);
    const SubjectParams sp = link(config.coefficients, obs.covariates, config.design);

    const double u = rng.uniform01();
    double s;
    if (u <= sp.gamma0) {
      s = 0.0;
      out.diagnostics.labels[i] = SubjectClass::kFraudster;
    } else if (u > 1.0 - sp.gamma1) {
      s = std::numeric_limits<double>::infinity();
      out.diagnostics.labels[i] = SubjectClass::kCured;
    } else {
      const double v = rng.uniform(sp.gamma0, 1.0 - sp.gamma1);
      if (config.root_method == RootMethod::kClosedForm) {
        const double rest = 1.0 - sp.gamma0 - sp.gamma1;
        s = weibull_quantile((v - sp.gamma0) / rest, WeibullParams{sp.shape, sp.scale});
      } else {
        s = bisect_lifetime(v, sp);
      }
      out.diagnostics.labels[i] = SubjectClass::kSusceptible;
      bound = std::max(bound, s);
    }
    out.diagnostics.latent_time[i] = s;
  }
  if (!(bound > 0.0)) {
    throw SimulationError(
        "censoring bound is degenerate: no subject drew a positive finite lifetime "
        "(sample is all instant defaults and cured subjects)");
  }
  out.diagnostics.censoring_bound = bound;

  // Pass 2: one shared uniform censoring law W ~ U(0, bound) for everyone.
  for (std::size_t i = 0; i < n; ++i) {
    Observation& obs = out.data.observations[i];
    const double s = out.diagnostics.latent_time[i];
    const double w = rng.uniform(0.0, bound);
    out.diagnostics.censor_time[i] = w;
    if (s <= w) {
      obs.time = s;
      obs.event = 1;
      ++out.diagnostics.n_events;
      if (s == 0.0) ++out.diagnostics.n_zero;
    } else {
      obs.time = w;
      obs.event = 0;
    }
  }
  return out;
}

}  // namespace zicure
