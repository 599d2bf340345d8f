#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace zicure {

// Raised for malformed data (ingestion or pre-fit checks). The message
// names the offending record or file line.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One loan record. event = 1 marks an observed default, including the
// instant default at time 0; event = 0 marks a right-censored lifetime.
struct Observation {
  double time = 0.0;
  int event = 1;
  Eigen::VectorXd covariates;
};

// Returns a description of what is wrong with a (time, event) pair, or
// nullopt when the pair is admissible. Shared by Dataset::validate and the
// CSV reader so both report the same rules.
std::optional<std::string> check_record(double time, int event);

struct Dataset {
  std::vector<Observation> observations;
  std::vector<std::string> covariate_names;

  std::size_t size() const { return observations.size(); }
  int n_covariates() const { return static_cast<int>(covariate_names.size()); }

  // Throws ValidationError naming the first offending record (1-based)
  // when any record violates: time finite and >= 0, event in {0, 1},
  // time == 0 implies event == 1, covariate arity uniform and finite.
  // Also rejects an empty dataset and one without a single positive-time
  // event (the Weibull block would be unidentified).
  void validate() const;
};

}  // namespace zicure
