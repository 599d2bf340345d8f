#pragma once

namespace zicure {

// Weibull distribution in shape/scale form: F(t) = 1 - exp(-(t/scale)^shape).
struct WeibullParams {
  double shape;
  double scale;

  // Throws std::invalid_argument unless both entries are positive and finite.
  WeibullParams(double shape, double scale);
};

// F(t) for t >= 0; throws std::domain_error on negative t.
double weibull_cdf(double t, const WeibullParams& p);

// Density f(t) for t >= 0. At t = 0 the limit is returned: +infinity when
// shape < 1, 1/scale when shape == 1, and 0 when shape > 1.
double weibull_pdf(double t, const WeibullParams& p);

// Inverse CDF for u in [0, 1); throws std::domain_error outside that range.
double weibull_quantile(double u, const WeibullParams& p);

struct WeibullMoments {
  double mean;
  double sd;
};

// Mean and standard deviation via log-gamma, stable for large shape.
WeibullMoments weibull_moments(const WeibullParams& p);

}  // namespace zicure
