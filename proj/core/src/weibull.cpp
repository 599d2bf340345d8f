#include "zicure/weibull.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zicure {

WeibullParams::WeibullParams(double shape_in, double scale_in)
    : shape(shape_in), scale(scale_in) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("Weibull shape must be positive and finite, got " +
                                std::to_string(shape_in));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("Weibull scale must be positive and finite, got " +
                                std::to_string(scale_in));
  }
}

namespace {

void require_nonnegative(double t, const char* fn) {
  if (!(t >= 0.0)) {
    throw std::domain_error(std::string(fn) + ": t must be nonnegative, got " +
                            std::to_string(t));
  }
}

}  // namespace

double weibull_cdf(double t, const WeibullParams& p) {
  require_nonnegative(t, "weibull_cdf");
  if (t == 0.0) return 0.0;
  return -std::expm1(-std::pow(t / p.scale, p.shape));
}

double weibull_pdf(double t, const WeibullParams& p) {
  require_nonnegative(t, "weibull_pdf");
  if (t == 0.0) {
    if (p.shape < 1.0) return std::numeric_limits<double>::infinity();
    if (p.shape == 1.0) return 1.0 / p.scale;
    return 0.0;
  }
  const double z = t / p.scale;
  return (p.shape / p.scale) * std::pow(z, p.shape - 1.0) *
         std::exp(-std::pow(z, p.shape));
}

double weibull_quantile(double u, const WeibullParams& p) {
  if (!(u >= 0.0) || u >= 1.0) {
    throw std::domain_error("weibull_quantile: u must lie in [0, 1), got " +
                            std::to_string(u));
  }
  if (u == 0.0) return 0.0;
  // -log(1 - u) computed as -log1p(-u) to keep precision for small u.
  return p.scale * std::pow(-std::log1p(-u), 1.0 / p.shape);
}

WeibullMoments weibull_moments(const WeibullParams& p) {
  // E[T] = scale * Gamma(1 + 1/shape); Var = scale^2 (Gamma(1 + 2/shape) -
  // Gamma(1 + 1/shape)^2). Gamma ratios go through lgamma so large shapes do
  // not overflow.
  const double g1 = std::exp(std::lgamma(1.0 + 1.0 / p.shape));
  const double g2 = std::exp(std::lgamma(1.0 + 2.0 / p.shape));
  const double mean = p.scale * g1;
  const double var = p.scale * p.scale * (g2 - g1 * g1);
  return {mean, std::sqrt(var > 0.0 ? var : 0.0)};
}

}  // namespace zicure
