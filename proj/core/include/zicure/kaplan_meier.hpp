#pragma once

#include <functional>
#include <string>
#include <vector>

#include "zicure/dataset.hpp"

namespace zicure {

// One distinct event time in a product-limit curve. survival_before is the
// estimate just before the drop, survival_after just after; at tied times
// events are processed before censorings, so censored records tied with an
// event time still count as at risk.
struct KmPoint {
  double time = 0.0;
  std::size_t at_risk = 0;
  std::size_t events = 0;
  double survival_before = 1.0;
  double survival_after = 1.0;
};

struct KmCurve {
  std::string label;
  std::size_t n = 0;          // stratum size
  double max_time = 0.0;      // largest observed time in the stratum
  std::vector<KmPoint> points;  // ascending distinct event times

  // Right-continuous step lookup S(t); S(t) = 1 before the first event
  // time. An event at t = 0 (instant default) makes S(0) < 1.
  double survival_at(double t) const;
};

using StratumPredicate = std::function<bool(const Observation&)>;

// Product-limit estimate over the records selected by `stratum`. Zero-time
// events enter as a drop at time 0. Throws ValidationError when the stratum
// is empty.
KmCurve km_estimate(const Dataset& data, const StratumPredicate& stratum,
                    std::string label = "all");

KmCurve km_estimate(const Dataset& data);

}  // namespace zicure
