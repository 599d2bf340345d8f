#include "zicure/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "zicure/kaplan_meier.hpp"

namespace zicure {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Fixed-order pairwise summation: deterministic for a given buffer and
// accurate to O(log n) rounding error.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace

double log_contribution(const Observation& obs, const SubjectParams& params) {
  const double rest = 1.0 - params.gamma0 - params.gamma1;
  if (obs.time == 0.0) {
    return params.gamma0 > 0.0 ? std::log(params.gamma0) : kNegInf;
  }
  const WeibullParams w{params.shape, params.scale};
  if (obs.event == 1) {
    const double density = rest * weibull_pdf(obs.time, w);
    return density > 0.0 ? std::log(density) : kNegInf;
  }
  const double survival = params.gamma1 + rest * (1.0 - weibull_cdf(obs.time, w));
  return survival > 0.0 ? std::log(survival) : kNegInf;
}

LogLikelihood::LogLikelihood(const Dataset& data, DesignSpec spec) : spec_(std::move(spec)) {
  data.validate();
  spec_.validate(data.n_covariates());
  if (spec_.n_params() == 0) {
    throw std::invalid_argument("design has no enabled coefficient blocks");
  }

  // Group identical covariate rows so each link evaluation is shared.
  std::map<std::vector<double>, int> group_of;
  records_.reserve(data.size());
  std::vector<double> key;
  for (const Observation& obs : data.observations) {
    key.assign(obs.covariates.begin(), obs.covariates.end());
    auto [it, inserted] = group_of.try_emplace(key, static_cast<int>(group_rows_.size()));
    if (inserted) group_rows_.push_back(obs.covariates);
    Record rec;
    rec.time = obs.time;
    rec.log_time = obs.time > 0.0 ? std::log(obs.time)
                                  : std::numeric_limits<double>::quiet_NaN();
    rec.event = obs.event;
    rec.group = it->second;
    records_.push_back(rec);
  }
  group_params_.resize(group_rows_.size());
  contributions_.resize(records_.size());
}

double LogLikelihood::operator()(const Eigen::VectorXd& flat) const {
  const CoefficientBlock coef = unpack(flat, spec_);
  const bool g0_on = spec_.block(Block::kGamma0).enabled;
  const bool g1_on = spec_.block(Block::kGamma1).enabled;

  for (std::size_t g = 0; g < group_rows_.size(); ++g) {
    const LinkTerms terms = link_predictors(coef, group_rows_[g], spec_);
    double shift = 0.0;
    if (g0_on) shift = std::max(shift, terms.eta1);
    if (g1_on) shift = std::max(shift, terms.eta2);
    const double denom = std::exp(-shift) + (g0_on ? std::exp(terms.eta1 - shift) : 0.0) +
                         (g1_on ? std::exp(terms.eta2 - shift) : 0.0);
    const double log_denom = std::log(denom);

    GroupParams& gp = group_params_[g];
    gp.log_g0 = g0_on ? terms.eta1 - shift - log_denom : kNegInf;
    gp.g1 = g1_on ? std::exp(terms.eta2 - shift) / denom : 0.0;
    // The susceptible mass is the baseline softmax term, formed in log
    // space directly so log(1 - gamma0 - gamma1) never loses precision to
    // cancellation.
    gp.log_rest = -shift - log_denom;
    gp.rest = std::exp(gp.log_rest);
    gp.eta3 = terms.eta3;
    gp.eta4 = terms.eta4;
    gp.shape = std::exp(terms.eta3);
  }

  for (std::size_t i = 0; i < records_.size(); ++i) {
    const Record& rec = records_[i];
    const GroupParams& gp = group_params_[static_cast<std::size_t>(rec.group)];
    if (rec.time == 0.0) {
      contributions_[i] = gp.log_g0;
    } else if (rec.event == 1) {
      // log f_w(t) = eta3 + (shape - 1)(log t - eta4) - eta4 - (t/scale)^shape
      const double centered = rec.log_time - gp.eta4;
      contributions_[i] = gp.log_rest + gp.eta3 + (gp.shape - 1.0) * centered - gp.eta4 -
                          std::exp(gp.shape * centered);
    } else {
      const double z = std::exp(gp.shape * (rec.log_time - gp.eta4));
      const double survival = gp.g1 + gp.rest * std::exp(-z);
      contributions_[i] = survival > 0.0 ? std::log(survival) : kNegInf;
    }
  }
  return pairwise_sum(contributions_.data(), contributions_.size());
}

Eigen::VectorXd LogLikelihood::score_fd(const Eigen::VectorXd& flat, double step) const {
  return fd_gradient([this](const Eigen::VectorXd& v) { return (*this)(v); }, flat, step,
                     FdPolicy::kThrow);
}

Eigen::MatrixXd LogLikelihood::hessian_fd(const Eigen::VectorXd& flat, double step) const {
  return fd_hessian([this](const Eigen::VectorXd& v) { return (*this)(v); }, flat, step);
}

Eigen::VectorXd default_init(const Dataset& data, const DesignSpec& spec) {
  data.validate();
  spec.validate(data.n_covariates());

  std::size_t n_zero = 0;
  std::size_t n_censored = 0;
  std::size_t n_event_pos = 0;
  double sum_pos_time = 0.0;
  std::size_t n_pos = 0;
  for (const Observation& obs : data.observations) {
    if (obs.time == 0.0) {
      ++n_zero;
    } else if (obs.event == 1) {
      ++n_event_pos;
    } else {
      ++n_censored;
    }
    if (obs.time > 0.0) {
      sum_pos_time += obs.time;
      ++n_pos;
    }
  }
  // Moment start for the masses: gamma0 ~ zero fraction, gamma1 ~ censored
  // fraction, with the positive-event share as the logit baseline. The 0.5
  // smoothing keeps empty cells finite.
  const double base = static_cast<double>(n_event_pos) + 0.5;
  const double eta1 = std::log((static_cast<double>(n_zero) + 0.5) / base);
  const double eta2 = std::log((static_cast<double>(n_censored) + 0.5) / base);

  // Weibull plot on the positive-time subsample: regress
  // log(-log S_km(t)) on log t over the event times; the slope estimates
  // the shape and exp(-intercept/slope) the scale.
  double shape0 = 1.0;
  double scale0 = n_pos > 0 ? sum_pos_time / static_cast<double>(n_pos) : 1.0;
  Dataset positive;
  positive.covariate_names = data.covariate_names;
  for (const Observation& obs : data.observations) {
    if (obs.time > 0.0) positive.observations.push_back(obs);
  }
  if (!positive.observations.empty()) {
    const KmCurve km = km_estimate(positive, [](const Observation&) { return true; });
    std::vector<double> zs;
    std::vector<double> ys;
    for (const KmPoint& p : km.points) {
      if (p.survival_after <= 0.0 || p.survival_after >= 1.0) continue;
      zs.push_back(std::log(p.time));
      ys.push_back(std::log(-std::log(p.survival_after)));
    }
    if (zs.size() >= 2) {
      const double n = static_cast<double>(zs.size());
      double mz = 0.0;
      double my = 0.0;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        mz += zs[i];
        my += ys[i];
      }
      mz /= n;
      my /= n;
      double szz = 0.0;
      double szy = 0.0;
      for (std::size_t i = 0; i < zs.size(); ++i) {
        szz += (zs[i] - mz) * (zs[i] - mz);
        szy += (zs[i] - mz) * (ys[i] - my);
      }
      if (szz > 1e-12) {
        const double slope = szy / szz;
        if (slope > 0.05 && slope < 20.0) {
          shape0 = slope;
          const double intercept = my - slope * mz;
          const double candidate = std::exp(-intercept / slope);
          if (std::isfinite(candidate) && candidate > 0.0) scale0 = candidate;
        }
      }
    }
  }

  CoefficientBlock init;
  auto fill = [&](Block b, double intercept) {
    const int len = spec.block_length(b);
    init[b] = Eigen::VectorXd::Zero(len);
    if (len > 0) init[b][0] = intercept;
  };
  fill(Block::kGamma0, eta1);
  fill(Block::kGamma1, eta2);
  fill(Block::kShape, std::log(shape0));
  fill(Block::kScale, std::log(scale0));
  return pack(init, spec);
}

FitResult fit(const Dataset& data, const DesignSpec& spec, const FitOptions& options) {
  LogLikelihood loglik(data, spec);

  Eigen::VectorXd x0 = options.init.has_value() ? *options.init : default_init(data, spec);
  if (x0.size() != spec.n_params()) {
    throw std::invalid_argument("starting point has length " + std::to_string(x0.size()) +
                                ", design expects " + std::to_string(spec.n_params()));
  }

  const OptReport report =
      maximize([&loglik](const Eigen::VectorXd& v) { return loglik(v); }, x0,
               options.controls);

  FitResult out;
  out.spec = spec;
  out.parameter_names = spec.parameter_names(data.covariate_names);
  out.estimates = report.argmax;
  out.coefficients = unpack(report.argmax, spec);
  out.loglik = report.value;
  out.converged = report.converged();
  out.termination = report.termination;
  out.iterations = report.iterations;
  out.gradient_inf_norm = report.gradient_inf_norm;
  out.n_observations = data.size();
  out.n_columns = data.n_covariates();

  const int p = spec.n_params();
  out.covariance_available = false;
  out.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  out.se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  out.z = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  try {
    const Eigen::MatrixXd neg_hessian =
        -loglik.hessian_fd(report.argmax, options.controls.fd_step);
    if (neg_hessian.allFinite()) {
      const Eigen::LLT<Eigen::MatrixXd> llt(neg_hessian);
      if (llt.info() == Eigen::Success) {
        out.covariance = llt.solve(Eigen::MatrixXd::Identity(p, p));
        out.covariance_available = true;
        for (int j = 0; j < p; ++j) {
          out.se[j] = std::sqrt(out.covariance(j, j));
          out.z[j] = std::abs(out.estimates[j]) / out.se[j];
        }
      }
    }
  } catch (const std::runtime_error&) {
    // A non-finite neighborhood at the optimum leaves the covariance
    // unavailable; the point estimates are still reported.
  }
  return out;
}

Prediction predict(const FitResult& fit, const Eigen::VectorXd& covariates,
                   const std::vector<double>& horizons) {
  if (static_cast<int>(covariates.size()) != fit.n_columns) {
    throw std::invalid_argument("predict: covariate row has " +
                                std::to_string(covariates.size()) + " entries, the model was fit to " +
                                std::to_string(fit.n_columns));
  }
  const SubjectParams sp = link(fit.coefficients, covariates, fit.spec);
  const MixtureParams mix{sp.gamma0, sp.gamma1, WeibullParams{sp.shape, sp.scale}};
  Prediction out;
  out.params = sp;
  out.survival.reserve(horizons.size());
  for (double t : horizons) {
    out.survival.push_back(mixture_survival(t, mix));
  }
  return out;
}

}  // namespace zicure
