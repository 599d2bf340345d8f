#include "zicure/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zicure {

void OptControls::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (!(gradient_tol > 0.0) || !(objective_tol > 0.0) || !(fd_step > 0.0)) {
    throw std::invalid_argument("optimizer tolerances must be positive");
  }
  if (!(armijo_c1 > 0.0) || armijo_c1 > 0.5) {
    throw std::invalid_argument("armijo_c1 must lie in (0, 1/2]");
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kGradient: return "gradient";
    case Termination::kObjectiveChange: return "objective-change";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kLineSearchFailure: return "line-search-failure";
  }
  return "?";
}

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x,
                            double step_scale, FdPolicy policy) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd grad(n);
  Eigen::VectorXd point = x;
  double f_center = std::numeric_limits<double>::quiet_NaN();  // computed on demand
  for (int j = 0; j < n; ++j) {
    const double h = step_scale * std::max(1.0, std::abs(x[j]));
    point[j] = x[j] + h;
    const double up = f(point);
    point[j] = x[j] - h;
    const double down = f(point);
    point[j] = x[j];
    if (std::isfinite(up) && std::isfinite(down)) {
      grad[j] = (up - down) / (2.0 * h);
      continue;
    }
    if (policy == FdPolicy::kThrow) {
      throw std::runtime_error(
          "finite-difference gradient: objective not finite at coordinate " +
          std::to_string(j) + (std::isfinite(up) ? " (backward step)" : " (forward step)"));
    }
    if (std::isnan(f_center)) f_center = f(x);
    if (std::isfinite(up) && std::isfinite(f_center)) {
      grad[j] = (up - f_center) / h;
    } else if (std::isfinite(down) && std::isfinite(f_center)) {
      grad[j] = (f_center - down) / h;
    } else {
      throw std::runtime_error(
          "finite-difference gradient: objective not finite on either side of coordinate " +
          std::to_string(j));
    }
  }
  return grad;
}

Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double step_scale) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd h(n);
  for (int j = 0; j < n; ++j) h[j] = step_scale * std::max(1.0, std::abs(x[j]));

  const double f0 = f(x);
  if (!std::isfinite(f0)) {
    throw std::runtime_error("finite-difference Hessian: objective not finite at the point");
  }
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd point = x;
  auto eval = [&](int i, double si, int j, double sj) {
    point[i] = x[i] + si * h[i];
    point[j] = x[j] + sj * h[j];
    const double value = f(point);
    point[i] = x[i];
    point[j] = x[j];
    if (!std::isfinite(value)) {
      throw std::runtime_error(
          "finite-difference Hessian: objective not finite near coordinates " +
          std::to_string(i) + ", " + std::to_string(j));
    }
    return value;
  };
  for (int i = 0; i < n; ++i) {
    const double fp = eval(i, 1.0, i, 1.0);   // i == j: both writes land on x_i + h_i
    const double fm = eval(i, -1.0, i, -1.0);
    hess(i, i) = (fp + fm - 2.0 * f0) / (h[i] * h[i]);
    for (int j = i + 1; j < n; ++j) {
      const double fpp = eval(i, 1.0, j, 1.0);
      const double fpm = eval(i, 1.0, j, -1.0);
      const double fmp = eval(i, -1.0, j, 1.0);
      const double fmm = eval(i, -1.0, j, -1.0);
      const double value = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = value;
      hess(j, i) = value;
    }
  }
  return hess;
}

OptReport maximize(const Objective& f, const Eigen::VectorXd& x0, const OptControls& controls) {
  controls.validate();
  const int n = static_cast<int>(x0.size());

  int evals = 0;
  // Internally minimize g = -f with textbook BFGS, reporting in terms of f.
  auto g = [&](const Eigen::VectorXd& x) {
    ++evals;
    return -f(x);
  };

  Eigen::VectorXd x = x0;
  double gx = g(x);
  if (!std::isfinite(gx)) {
    throw std::invalid_argument("maximize: objective is not finite at the starting point");
  }
  Eigen::VectorXd grad = fd_gradient(g, x, controls.fd_step, FdPolicy::kOneSided);

  const double grad_norm0 = grad.norm();
  Eigen::MatrixXd H =
      Eigen::MatrixXd::Identity(n, n) / std::max(grad_norm0, 1e-12);

  auto make_report = [&](Termination why, int iterations) {
    OptReport report;
    report.argmax = x;
    report.value = -gx;
    report.iterations = iterations;
    report.n_evaluations = evals;
    report.termination = why;
    report.gradient_inf_norm = grad.lpNorm<Eigen::Infinity>();
    return report;
  };

  for (int iter = 0; iter < controls.max_iterations; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() <=
        controls.gradient_tol * std::max(1.0, std::abs(gx))) {
      return make_report(Termination::kGradient, iter);
    }

    const double phi0 = gx;
    Eigen::VectorXd d;
    double slope = 0.0;
    double best_a = -1.0;
    double best_phi = phi0;
    bool steepest = false;  // d is already the scaled steepest-descent direction
    auto reset_metric = [&] {
      H = Eigen::MatrixXd::Identity(n, n) / std::max(grad.norm(), 1e-12);
      steepest = true;
    };

    for (int attempt = 0; attempt < 2 && best_a <= 0.0; ++attempt) {
      d = -(H * grad);
      slope = grad.dot(d);
      if (!(slope < 0.0) || !d.allFinite()) {
        // Curvature information went bad; restart from scaled steepest descent.
        reset_metric();
        d = -(H * grad);
        slope = grad.dot(d);
      }

      // Parabolic line search on phi(a) = g(x + a d). A parabola through
      // phi(0), phi'(0) = slope and one finite trial is exact for quadratic
      // objectives, so the vertex jump is the exact step there.
      double a = 1.0;
      for (int trial = 0; trial < 60; ++trial) {
        const double phi_a = g(x + a * d);
        if (std::isfinite(phi_a)) {
          double cand_a = a;
          double cand_phi = phi_a;
          const double denom = phi_a - phi0 - slope * a;
          if (denom > 0.0) {
            double vertex = -slope * a * a / (2.0 * denom);
            vertex = std::clamp(vertex, 1e-3 * a, 1e4 * a);
            const double phi_v = g(x + vertex * d);
            if (std::isfinite(phi_v) && phi_v < cand_phi) {
              cand_a = vertex;
              cand_phi = phi_v;
            }
          }
          if (cand_phi <= phi0 + controls.armijo_c1 * cand_a * slope) {
            best_a = cand_a;
            best_phi = cand_phi;
            break;
          }
        }
        a *= 0.5;
        if (a < 1e-20) break;
      }
      if (best_a <= 0.0) {
        if (steepest) break;  // even the plain gradient direction stalls
        // The quasi-Newton direction may just be stale; drop the accumulated
        // curvature and retry once along the gradient before giving up.
        reset_metric();
      }
    }
    if (best_a <= 0.0) {
      return make_report(Termination::kLineSearchFailure, iter);
    }

    const Eigen::VectorXd s = best_a * d;
    const Eigen::VectorXd x_new = x + s;
    const double gx_new = best_phi;
    const Eigen::VectorXd grad_new =
        fd_gradient(g, x_new, controls.fd_step, FdPolicy::kOneSided);

    Eigen::VectorXd y = grad_new - grad;

    // Powell damping. Along the search direction B s = -best_a * grad
    // exactly (B = H^{-1}), so s'Bs = -best_a * s'grad without a solve.
    const double sBs = -best_a * s.dot(grad);
    double sy = s.dot(y);
    if (sBs > 0.0 && sy < 0.2 * sBs) {
      const double theta = 0.8 * sBs / (sBs - sy);
      y = theta * y + (1.0 - theta) * (-best_a * grad);
      sy = s.dot(y);
    }
    if (sy > 0.0) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * y;
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      H -= rho * (s * Hy.transpose() + Hy * s.transpose());
      H += (rho * rho * y.dot(Hy) + rho) * (s * s.transpose());
    }

    const double change = std::abs(gx_new - gx);
    x = x_new;
    gx = gx_new;
    grad = grad_new;
    if (change <= controls.objective_tol * std::max(1.0, std::abs(gx))) {
      return make_report(Termination::kObjectiveChange, iter + 1);
    }
  }
  return make_report(Termination::kMaxIterations, controls.max_iterations);
}

}  // namespace zicure
