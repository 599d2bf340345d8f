#include "zicure/mixture.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zicure {

MixtureParams::MixtureParams(double gamma0_in, double gamma1_in, WeibullParams weibull_in)
    : gamma0(gamma0_in), gamma1(gamma1_in), weibull(weibull_in) {
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) {
    throw std::invalid_argument("mixture gamma0 must be finite and nonnegative, got " +
                                std::to_string(gamma0_in));
  }
  if (!(gamma1 >= 0.0) || !std::isfinite(gamma1)) {
    throw std::invalid_argument("mixture gamma1 must be finite and nonnegative, got " +
                                std::to_string(gamma1_in));
  }
  if (!(gamma0 + gamma1 < 1.0)) {
    throw std::invalid_argument("mixture masses must satisfy gamma0 + gamma1 < 1, got " +
                                std::to_string(gamma0_in + gamma1_in));
  }
}

double mixture_survival(double t, const MixtureParams& m) {
  const double rest = 1.0 - m.gamma0 - m.gamma1;
  return m.gamma1 + rest * (1.0 - weibull_cdf(t, m.weibull));
}

double mixture_cdf(double t, const MixtureParams& m) {
  const double rest = 1.0 - m.gamma0 - m.gamma1;
  return m.gamma0 + rest * weibull_cdf(t, m.weibull);
}

double mixture_density(double t, const MixtureParams& m) {
  if (t == 0.0) return m.gamma0;
  const double rest = 1.0 - m.gamma0 - m.gamma1;
  return rest * weibull_pdf(t, m.weibull);
}

}  // namespace zicure
