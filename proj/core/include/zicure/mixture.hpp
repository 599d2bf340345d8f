#pragma once

#include "zicure/weibull.hpp"

namespace zicure {

// Improper lifetime mixture with a point mass gamma0 at zero (instant
// defaulters), a mass gamma1 at infinity (never-defaulters), and a Weibull
// law on the susceptible remainder:
//   S(t) = gamma1 + (1 - gamma0 - gamma1) * S_w(t),  S(0) = 1 - gamma0.
struct MixtureParams {
  double gamma0;
  double gamma1;
  WeibullParams weibull;

  // Throws std::invalid_argument unless gamma0, gamma1 >= 0 and
  // gamma0 + gamma1 < 1.
  MixtureParams(double gamma0, double gamma1, WeibullParams weibull);
};

// Population survival gamma1 + (1 - gamma0 - gamma1) * S_w(t) for t >= 0.
double mixture_survival(double t, const MixtureParams& m);

// Population CDF gamma0 + (1 - gamma0 - gamma1) * F_w(t); complements
// mixture_survival exactly up to rounding.
double mixture_cdf(double t, const MixtureParams& m);

// Density with respect to counting measure at zero plus Lebesgue measure on
// (0, inf): gamma0 at t = 0, (1 - gamma0 - gamma1) * f_w(t) for t > 0.
double mixture_density(double t, const MixtureParams& m);

}  // namespace zicure
