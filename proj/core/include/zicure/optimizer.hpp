#pragma once

#include <functional>

#include <Eigen/Core>

namespace zicure {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptControls {
  int max_iterations = 200;
  // Converged when |grad|_inf <= gradient_tol * max(1, |f|).
  double gradient_tol = 1e-5;
  // Converged when the relative objective change between accepted steps
  // drops below objective_tol.
  double objective_tol = 1e-9;
  // Armijo sufficient-increase constant.
  double armijo_c1 = 1e-4;
  // Finite-difference step factor: h_j = fd_step * max(1, |x_j|).
  double fd_step = 1e-5;

  // Throws std::invalid_argument on nonpositive tolerances or iteration
  // budget, or armijo_c1 outside (0, 1/2].
  void validate() const;
};

enum class Termination {
  kGradient,
  kObjectiveChange,
  kMaxIterations,
  kLineSearchFailure,
};

const char* to_string(Termination t);

struct OptReport {
  Eigen::VectorXd argmax;
  double value = 0.0;
  int iterations = 0;
  int n_evaluations = 0;
  Termination termination = Termination::kMaxIterations;
  double gradient_inf_norm = 0.0;

  bool converged() const {
    return termination == Termination::kGradient ||
           termination == Termination::kObjectiveChange;
  }
};

// BFGS ascent with finite-difference gradients. The line search fits a
// parabola through phi(0), phi'(0) and the trial step and jumps to its
// vertex, which lands on the exact one-dimensional maximizer when the
// objective is quadratic; steps must satisfy the Armijo sufficient-increase
// condition. The inverse-Hessian approximation starts at I/|grad|_2 and is
// kept positive definite by Powell damping. Throws std::invalid_argument
// when f is not finite at x0.
OptReport maximize(const Objective& f, const Eigen::VectorXd& x0,
                   const OptControls& controls = {});

enum class FdPolicy {
  kThrow,     // non-finite neighborhood evaluation raises std::runtime_error
  kOneSided,  // falls back to a one-sided difference when one side fails
};

// Central-difference gradient with step h_j = step_scale * max(1, |x_j|).
// Errors name the offending coordinate.
Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x,
                            double step_scale = 1e-5, FdPolicy policy = FdPolicy::kThrow);

// Central-difference Hessian with the same step rule. Each unordered
// coordinate pair is evaluated once and mirrored, so the result is exactly
// symmetric.
Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x,
                           double step_scale = 1e-5);

}  // namespace zicure
