#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "zicure/likelihood.hpp"
#include "zicure/mixture.hpp"
#include "zicure/rng.hpp"
#include "zicure/simulate.hpp"

using namespace zicure;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Observation obs(double t, int event, double x) {
  Observation o;
  o.time = t;
  o.event = event;
  o.covariates = Eigen::VectorXd::Constant(1, x);
  return o;
}

Dataset scenario_data(int scenario, std::size_t n, std::uint64_t seed) {
  SimulationConfig config = scenario_preset(scenario);
  config.n = n;
  config.seed = seed;
  return simulate_dataset(config).data;
}

VectorXd scenario_truth(int scenario) {
  const SimulationConfig config = scenario_preset(scenario);
  return pack(config.coefficients, config.design);
}

// Strip the covariate column, keeping times and events.
Dataset intercept_only(const Dataset& d, double level) {
  Dataset out;
  for (const Observation& o : d.observations) {
    if (o.covariates[0] != level) continue;
    Observation copy;
    copy.time = o.time;
    copy.event = o.event;
    copy.covariates = Eigen::VectorXd(0);
    out.observations.push_back(copy);
  }
  return out;
}

}  // namespace

TEST_SUITE("likelihood") {

TEST_CASE("log_contribution matches the density written out by hand") {
  const SubjectParams p{0.1, 0.3, 1.4, 5.0};
  const MixtureParams m{p.gamma0, p.gamma1, {p.shape, p.scale}};
  const double rest = 1.0 - p.gamma0 - p.gamma1;

  // Instant default carries the point mass.
  CHECK(log_contribution(obs(0.0, 1, 0.0), p) ==
        doctest::Approx(std::log(p.gamma0)).epsilon(1e-14));
  // Positive-time event: continuous part of the density.
  CHECK(log_contribution(obs(2.5, 1, 0.0), p) ==
        doctest::Approx(std::log(mixture_density(2.5, m))).epsilon(1e-12));
  CHECK(log_contribution(obs(2.5, 1, 0.0), p) ==
        doctest::Approx(std::log(rest) + std::log(weibull_pdf(2.5, m.weibull)))
            .epsilon(1e-12));
  // Censored: survivor mass including the cured plateau.
  CHECK(log_contribution(obs(4.0, 0, 0.0), p) ==
        doctest::Approx(std::log(mixture_survival(4.0, m))).epsilon(1e-12));
}

TEST_CASE("structurally impossible records yield -infinity, not NaN") {
  // No zero-inflation mass but an instant default was observed.
  CHECK(log_contribution(obs(0.0, 1, 0.0), {0.0, 0.3, 1.0, 1.0}) == -kInf);
  // Saturated gammas leave no susceptible mass for a positive event.
  CHECK(log_contribution(obs(1.0, 1, 0.0), {0.4, 0.6, 1.0, 1.0}) == -kInf);
  // Censored far in the tail with no cured fraction underflows to zero mass.
  CHECK(log_contribution(obs(1e300, 0, 0.0), {0.1, 0.0, 2.0, 1.0}) == -kInf);
}

TEST_CASE("evaluator equals the per-record sum over a random design") {
  Rng rng(99);
  const DesignSpec spec = DesignSpec::saturated(1);
  for (int rep = 0; rep < 30; ++rep) {
    Dataset d;
    d.covariate_names = {"x"};
    const int n = 3 + static_cast<int>(rng.uniform01() * 30);
    for (int i = 0; i < n; ++i) {
      const double x = rng.bernoulli(0.5) ? 1.0 : 0.0;
      const double u = rng.uniform01();
      if (u < 0.15) {
        d.observations.push_back(obs(0.0, 1, x));
      } else if (u < 0.6) {
        d.observations.push_back(obs(rng.uniform(0.01, 8.0), 1, x));
      } else {
        d.observations.push_back(obs(rng.uniform(0.01, 8.0), 0, x));
      }
    }
    if (![&] {
          for (const auto& o : d.observations)
            if (o.event == 1 && o.time > 0) return true;
          return false;
        }())
      d.observations.push_back(obs(1.0, 1, 0.0));

    VectorXd theta(spec.n_params());
    for (int j = 0; j < theta.size(); ++j) theta[j] = rng.uniform(-1.0, 1.0);

    const LogLikelihood ll(d, spec);
    double direct = 0.0;
    for (const Observation& o : d.observations) {
      direct += log_contribution(o, link(theta, o.covariates, spec));
    }
    CHECK(ll(theta) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("identical covariate rows are grouped") {
  Dataset d;
  d.covariate_names = {"x"};
  for (int i = 0; i < 100; ++i) {
    d.observations.push_back(obs(0.5 + i * 0.01, i % 2, i % 2 == 0 ? 0.0 : 1.0));
  }
  d.observations.push_back(obs(1.0, 1, 0.0));
  const LogLikelihood ll(d, DesignSpec::saturated(1));
  CHECK(ll.n_records() == 101);
  CHECK(ll.n_groups() == 2);
}

TEST_CASE("impossible data under the design propagates -infinity") {
  Dataset d;
  d.covariate_names = {};
  Observation zero;
  zero.time = 0.0;
  zero.event = 1;
  zero.covariates = Eigen::VectorXd(0);
  Observation event;
  event.time = 2.0;
  event.event = 1;
  event.covariates = Eigen::VectorXd(0);
  d.observations = {zero, event};

  DesignSpec spec = DesignSpec::saturated(0);
  spec.block(Block::kGamma0).enabled = false;  // no zero-inflation mass

  const LogLikelihood ll(d, spec);
  CHECK(ll(VectorXd::Zero(spec.n_params())) == -kInf);
  // The fit cannot start from a -infinity objective.
  CHECK_THROWS_AS(fit(d, spec), std::invalid_argument);
}

TEST_CASE("likelihood factorizes over a saturated binary covariate") {
  const Dataset d = scenario_data(2, 1000, 31);
  OptControls controls;
  controls.gradient_tol = 1e-7;
  controls.max_iterations = 500;
  FitOptions options;
  options.controls = controls;

  const FitResult full = fit(d, DesignSpec::saturated(1), options);
  REQUIRE(full.converged);

  const Dataset d0 = intercept_only(d, 0.0);
  const Dataset d1 = intercept_only(d, 1.0);
  const FitResult f0 = fit(d0, DesignSpec::saturated(0), options);
  const FitResult f1 = fit(d1, DesignSpec::saturated(0), options);
  REQUIRE(f0.converged);
  REQUIRE(f1.converged);

  // The saturated model reparametrizes the two groups independently, so
  // the maxima must agree.
  CHECK(full.loglik ==
        doctest::Approx(f0.loglik + f1.loglik).epsilon(1e-8));
}

TEST_CASE("truth outscores perturbed parameters on a large sample") {
  const Dataset d = scenario_data(2, 2000, 17);
  const LogLikelihood ll(d, DesignSpec::saturated(1));
  const VectorXd truth = scenario_truth(2);
  const double at_truth = ll(truth);
  REQUIRE(std::isfinite(at_truth));

  Rng rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    VectorXd delta(truth.size());
    for (int j = 0; j < delta.size(); ++j) delta[j] = rng.uniform(-1.0, 1.0);
    delta *= 0.5 / delta.norm();
    CHECK(ll(truth + delta) < at_truth);
  }
}

TEST_CASE("fit recovers the generating parameters at n = 2000") {
  const Dataset d = scenario_data(2, 2000, 7);
  const FitResult fr = fit(d, DesignSpec::saturated(1));
  REQUIRE(fr.converged);
  const VectorXd truth = scenario_truth(2);
  CHECK((fr.estimates - truth).lpNorm<Eigen::Infinity>() < 0.35);
  CHECK(fr.n_observations == 2000);
  REQUIRE(fr.parameter_names.size() == 8);
  CHECK(fr.parameter_names[0] == "g0.intercept");
  CHECK(fr.parameter_names[7] == "scale.x");

  // Standard errors from the observed information.
  REQUIRE(fr.covariance_available);
  for (int j = 0; j < fr.se.size(); ++j) {
    CHECK(fr.se[j] > 0.0);
    CHECK(fr.se[j] < 1.0);  // n = 2000 pins every block well below this
    CHECK(fr.z[j] ==
          doctest::Approx(std::abs(fr.estimates[j]) / fr.se[j]).epsilon(1e-12));
  }
}

TEST_CASE("the reported optimum has a small score and concave curvature") {
  const Dataset d = scenario_data(1, 1000, 23);
  const FitResult fr = fit(d, DesignSpec::saturated(1));
  REQUIRE(fr.converged);

  const LogLikelihood ll(d, DesignSpec::saturated(1));
  const VectorXd score = ll.score_fd(fr.estimates);
  const double tol = 1e-5 * std::max(1.0, std::abs(fr.loglik));
  CHECK(score.lpNorm<Eigen::Infinity>() <= tol);

  const Eigen::MatrixXd hess = ll.hessian_fd(fr.estimates);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  CHECK(eig.eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("default initializer lands in the finite region") {
  for (int scenario : {1, 2, 3}) {
    const Dataset d = scenario_data(scenario, 400, 11);
    const DesignSpec spec = DesignSpec::saturated(1);
    const VectorXd init = default_init(d, spec);
    REQUIRE(init.size() == spec.n_params());
    CHECK(init.allFinite());
    const LogLikelihood ll(d, spec);
    CHECK(std::isfinite(ll(init)));
  }
}

TEST_CASE("explicit starting points are validated") {
  const Dataset d = scenario_data(1, 200, 3);
  FitOptions options;
  options.init = VectorXd::Zero(3);  // saturated design needs 8
  CHECK_THROWS_AS(fit(d, DesignSpec::saturated(1), options),
                  std::invalid_argument);

  options.init = scenario_truth(1);
  const FitResult fr = fit(d, DesignSpec::saturated(1), options);
  CHECK(fr.converged);
}

TEST_CASE("predict reports linked parameters and survival curves") {
  const Dataset d = scenario_data(2, 800, 5);
  const FitResult fr = fit(d, DesignSpec::saturated(1));
  REQUIRE(fr.converged);

  const VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
  const Prediction pred = predict(fr, x, {0.0, 0.5, 1.0, 2.0, 4.0, 8.0});
  CHECK(pred.params.gamma0 + pred.params.gamma1 < 1.0);
  REQUIRE(pred.survival.size() == 6);
  CHECK(pred.survival[0] ==
        doctest::Approx(1.0 - pred.params.gamma0).epsilon(1e-12));
  for (std::size_t i = 1; i < pred.survival.size(); ++i) {
    CHECK(pred.survival[i] <= pred.survival[i - 1]);
    CHECK(pred.survival[i] >= pred.params.gamma1);
  }

  CHECK_THROWS_AS(predict(fr, Eigen::VectorXd::Zero(2), {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(predict(fr, x, {-1.0}), std::domain_error);
}

}  // TEST_SUITE
