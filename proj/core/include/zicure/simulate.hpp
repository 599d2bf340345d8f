#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zicure/dataset.hpp"
#include "zicure/links.hpp"
#include "zicure/rng.hpp"

namespace zicure {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SubjectClass { kFraudster, kSusceptible, kCured };

const char* to_string(SubjectClass c);

// How susceptible lifetimes are drawn from the conditional Weibull: the
// closed-form quantile, or bisection on the population CDF (kept as a
// cross-check; both must agree to tight tolerance).
enum class RootMethod { kClosedForm, kBisection };

// Draws one covariate row per subject.
using CovariateSampler = std::function<Eigen::VectorXd(Rng&)>;

struct SimulationConfig {
  CoefficientBlock coefficients;
  DesignSpec design;
  std::vector<std::string> covariate_names;
  CovariateSampler sampler;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  RootMethod root_method = RootMethod::kClosedForm;
};

// Coefficients, design (intercept + one Bernoulli(0.5) covariate per
// block) and sampler for the three study scenarios; the caller fills in n
// and seed. Throws std::invalid_argument for a scenario outside {1, 2, 3}.
SimulationConfig scenario_preset(int scenario);

// Latent quantities kept for diagnostics and tests.
struct SimulationDiagnostics {
  std::vector<SubjectClass> labels;
  std::vector<double> latent_time;   // s_i; +infinity for the cured
  std::vector<double> censor_time;   // w_i
  double censoring_bound = 0.0;      // max finite s_i
  std::size_t n_events = 0;          // delta = 1 count (includes time 0)
  std::size_t n_zero = 0;            // fraudster count
  double censored_rate() const;
};

struct SimulationResult {
  Dataset data;
  SimulationDiagnostics diagnostics;
};

// Three-population generator. Per subject: draw the covariate row, link
// the parameters, and classify by u ~ U(0,1): u <= gamma0 is an instant
// default (s = 0), u > 1 - gamma1 is cured (s = +inf), otherwise redraw
// v ~ U(gamma0, 1 - gamma1) and invert the susceptible Weibull at
// (v - gamma0) / (1 - gamma0 - gamma1). A second pass draws censoring
// times w ~ U(0, max finite s) shared across the sample, then reports
// t = min(s, w) with delta = 1 when s <= w (ties count as events). Throws
// SimulationError when no subject has a positive finite lifetime, since
// the censoring bound would be degenerate.
SimulationResult simulate_dataset(const SimulationConfig& config);

}  // namespace zicure
