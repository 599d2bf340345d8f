#include "zicure/dataset.hpp"

#include <cmath>
#include <string>

namespace zicure {

std::optional<std::string> check_record(double time, int event) {
  if (!std::isfinite(time)) return "t must be finite";
  if (time < 0.0) return "t must be nonnegative, got " + std::to_string(time);
  if (event != 0 && event != 1) {
    return "delta must be 0 or 1, got " + std::to_string(event);
  }
  if (time == 0.0 && event != 1) {
    return "a record with t = 0 must be an event (delta = 1)";
  }
  return std::nullopt;
}

void Dataset::validate() const {
  if (observations.empty()) {
    throw ValidationError("dataset is empty");
  }
  const int arity = n_covariates();
  bool any_positive_event = false;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Observation& obs = observations[i];
    const std::string where = "record " + std::to_string(i + 1) + ": ";
    if (auto problem = check_record(obs.time, obs.event)) {
      throw ValidationError(where + *problem);
    }
    if (obs.covariates.size() != arity) {
      throw ValidationError(where + "has " + std::to_string(obs.covariates.size()) +
                            " covariates, dataset declares " + std::to_string(arity));
    }
    for (int j = 0; j < obs.covariates.size(); ++j) {
      if (!std::isfinite(obs.covariates[j])) {
        throw ValidationError(where + "covariate '" +
                              covariate_names[static_cast<std::size_t>(j)] +
                              "' is not finite");
      }
    }
    if (obs.event == 1 && obs.time > 0.0) any_positive_event = true;
  }
  if (!any_positive_event) {
    throw ValidationError(
        "dataset has no event with t > 0; the Weibull component cannot be fit");
  }
}

}  // namespace zicure
