#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zicure/dataset.hpp"
#include "zicure/links.hpp"
#include "zicure/mixture.hpp"
#include "zicure/optimizer.hpp"

namespace zicure {

// Log-density contribution of one record under its linked parameters:
//   t = 0 (instant default)  -> log gamma0
//   event at t > 0           -> log(1 - gamma0 - gamma1) + log f_w(t)
//   censored at t            -> log(gamma1 + (1 - gamma0 - gamma1) S_w(t))
// Returns -infinity when the contribution is structurally zero (for
// example a zero-time event with gamma0 = 0), which callers treat as a
// rejection sentinel rather than an error.
double log_contribution(const Observation& obs, const SubjectParams& params);

// Log-likelihood evaluator for a dataset under a design. Construction
// caches log event times and groups records that share a covariate row so
// the links run once per distinct row per evaluation. Contributions are
// accumulated with pairwise summation in record order, making the value
// bit-reproducible for a fixed dataset. Instances hold reusable scratch
// buffers and must not be shared across threads.
class LogLikelihood {
 public:
  // Validates the dataset and the design against its covariate arity.
  LogLikelihood(const Dataset& data, DesignSpec spec);

  // Evaluate at a packed coefficient vector; -infinity propagates from any
  // record whose contribution vanishes.
  double operator()(const Eigen::VectorXd& flat) const;

  // Central finite-difference score with step h_j = step * max(1, |x_j|).
  // A non-finite neighborhood evaluation raises std::runtime_error naming
  // the offending coordinate.
  Eigen::VectorXd score_fd(const Eigen::VectorXd& flat, double step = 1e-5) const;

  // Central finite-difference Hessian, exactly symmetric by construction.
  Eigen::MatrixXd hessian_fd(const Eigen::VectorXd& flat, double step = 1e-5) const;

  const DesignSpec& spec() const { return spec_; }
  int n_params() const { return spec_.n_params(); }
  std::size_t n_records() const { return records_.size(); }
  std::size_t n_groups() const { return group_rows_.size(); }

 private:
  struct Record {
    double time;
    double log_time;  // NaN for t = 0
    int event;
    int group;
  };
  struct GroupParams {
    double log_g0;
    double g1;
    double rest;
    double log_rest;
    double shape;
    double eta3;
    double eta4;
  };

  DesignSpec spec_;
  std::vector<Record> records_;
  std::vector<Eigen::VectorXd> group_rows_;
  mutable std::vector<GroupParams> group_params_;
  mutable std::vector<double> contributions_;
};

enum class FitStatus { kConverged, kNotConverged };

struct FitResult {
  DesignSpec spec;
  std::vector<std::string> parameter_names;
  Eigen::VectorXd estimates;  // packed order beta1, beta2, beta3, beta4
  CoefficientBlock coefficients;
  double loglik = 0.0;
  bool converged = false;
  Termination termination = Termination::kMaxIterations;
  int iterations = 0;
  double gradient_inf_norm = 0.0;
  std::size_t n_observations = 0;
  int n_columns = 0;  // covariate arity the model was fit to

  // (-H)^{-1} at the optimum. Unavailable (flag false, se/z all NaN) when
  // the negated Hessian is not positive definite.
  bool covariance_available = false;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd se;
  Eigen::VectorXd z;  // |estimate| / se
};

struct FitOptions {
  OptControls controls;
  // Starting point in packed order; defaults to a data-driven initializer
  // (empirical mass fractions for the gammas, a Kaplan-Meier Weibull plot
  // for shape/scale).
  std::optional<Eigen::VectorXd> init;
};

// Data-driven starting point used when FitOptions::init is not given.
Eigen::VectorXd default_init(const Dataset& data, const DesignSpec& spec);

// Maximum-likelihood fit. Deterministic: no randomness enters anywhere, so
// repeated calls on the same data produce identical results. Throws
// ValidationError for bad data and std::invalid_argument for design or
// starting-point mismatches; non-convergence is reported in the result,
// not thrown.
FitResult fit(const Dataset& data, const DesignSpec& spec, const FitOptions& options = {});

struct Prediction {
  SubjectParams params;
  std::vector<double> survival;  // S(t) per requested horizon
};

// Linked parameters and population survival at each horizon for one
// covariate row. Throws std::invalid_argument on arity mismatch and
// std::domain_error on a negative horizon.
Prediction predict(const FitResult& fit, const Eigen::VectorXd& covariates,
                   const std::vector<double>& horizons);

}  // namespace zicure
