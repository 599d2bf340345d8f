#include "zicure/kaplan_meier.hpp"

#include <algorithm>
#include <cmath>

namespace zicure {

double KmCurve::survival_at(double t) const {
  // Largest event time <= t determines the step value.
  double value = 1.0;
  for (const KmPoint& p : points) {
    if (p.time > t) break;
    value = p.survival_after;
  }
  return value;
}

KmCurve km_estimate(const Dataset& data, const StratumPredicate& stratum, std::string label) {
  std::vector<std::pair<double, int>> records;  // (time, event)
  double max_time = 0.0;
  for (const Observation& obs : data.observations) {
    if (!stratum(obs)) continue;
    records.emplace_back(obs.time, obs.event);
    max_time = std::max(max_time, obs.time);
  }
  if (records.empty()) {
    throw ValidationError("Kaplan-Meier stratum '" + label + "' selects no records");
  }
  std::sort(records.begin(), records.end());

  KmCurve curve;
  curve.label = std::move(label);
  curve.n = records.size();
  curve.max_time = max_time;

  // Walk distinct times in ascending order. At a tied time, events are
  // applied before censorings, so the risk set at time tau counts every
  // record with t >= tau.
  double survival = 1.0;
  std::size_t at_risk = records.size();
  std::size_t i = 0;
  while (i < records.size()) {
    const double tau = records[i].first;
    std::size_t events = 0;
    std::size_t tied = 0;
    while (i < records.size() && records[i].first == tau) {
      events += static_cast<std::size_t>(records[i].second);
      ++tied;
      ++i;
    }
    if (events > 0) {
      KmPoint point;
      point.time = tau;
      point.at_risk = at_risk;
      point.events = events;
      point.survival_before = survival;
      survival *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      point.survival_after = survival;
      curve.points.push_back(point);
    }
    at_risk -= tied;
  }
  return curve;
}

KmCurve km_estimate(const Dataset& data) {
  return km_estimate(data, [](const Observation&) { return true; });
}

}  // namespace zicure
