#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "zicure/optimizer.hpp"

using namespace zicure;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Concave quadratic with distinct curvatures and a mild rotation.
struct Quadratic {
  MatrixXd a;
  VectorXd center;

  explicit Quadratic(int dim) : a(MatrixXd::Zero(dim, dim)), center(dim) {
    for (int i = 0; i < dim; ++i) {
      a(i, i) = static_cast<double>((i + 1) * (i + 1));
      center[i] = 0.3 * (i + 1);
      if (i + 1 < dim) {
        a(i, i + 1) = 0.25;
        a(i + 1, i) = 0.25;
      }
    }
  }

  double operator()(const VectorXd& x) const {
    const VectorXd d = x - center;
    return -0.5 * d.dot(a * d);
  }
};

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("controls validation") {
  OptControls c;
  CHECK_NOTHROW(c.validate());
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.gradient_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.armijo_c1 = 0.6;  // beyond 1/2 breaks the parabolic search guarantees
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.fd_step = -1e-6;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("quadratics converge in a handful of iterations") {
  // With finite-difference gradients the textbook n-step bound loosens a
  // little; 2n + 3 still rules out anything but fast BFGS behaviour.
  for (int dim : {1, 2, 5, 8}) {
    const Quadratic q(dim);
    const OptReport rep = maximize([&](const VectorXd& x) { return q(x); },
                                   VectorXd::Zero(dim));
    CAPTURE(dim);
    CHECK(rep.converged());
    CHECK(rep.iterations <= 2 * dim + 3);
    CHECK((rep.argmax - q.center).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK(rep.value == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("starting at the optimum terminates immediately") {
  const Quadratic q(3);
  const OptReport rep =
      maximize([&](const VectorXd& x) { return q(x); }, q.center);
  CHECK(rep.termination == Termination::kGradient);
  CHECK(rep.iterations == 0);
  CHECK(rep.argmax == q.center);
}

TEST_CASE("banana valley is followed to the maximum") {
  // Maximize the negated Rosenbrock function from the classic start.
  const Objective f = [](const VectorXd& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return -(a * a + 100.0 * b * b);
  };
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  OptControls controls;
  controls.gradient_tol = 1e-7;
  const OptReport rep = maximize(f, x0, controls);
  CHECK(rep.converged());
  CHECK(rep.argmax[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.argmax[1] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.iterations < 200);
}

TEST_CASE("gradient test scales with the objective magnitude") {
  // |f| ~ 1e8, so the gradient threshold 1e-5 * |f| admits a point whose
  // absolute gradient is far from zero; termination is still 'gradient'.
  const Objective f = [](const VectorXd& x) {
    const double d = x[0] - 1.0;
    return 1.0e8 - d * d;
  };
  const OptReport rep = maximize(f, VectorXd::Zero(1));
  CHECK(rep.termination == Termination::kGradient);
  CHECK(rep.iterations == 0);  // |grad| = 2 <= 1e-5 * 1e8 at the start
}

TEST_CASE("iteration budget is honored") {
  const Quadratic q(6);
  OptControls controls;
  controls.max_iterations = 2;
  controls.gradient_tol = 1e-14;
  controls.objective_tol = 1e-16;
  const OptReport rep =
      maximize([&](const VectorXd& x) { return q(x); }, VectorXd::Zero(6),
               controls);
  CHECK(!rep.converged());
  CHECK(rep.termination == Termination::kMaxIterations);
  CHECK(rep.iterations == 2);
}

TEST_CASE("line search failure is reported, not thrown") {
  // Finite at the start, -inf everywhere the ascent direction leads: every
  // trial step is rejected and the search gives up cleanly.
  const Objective f = [](const VectorXd& x) {
    if (x[0] > 0.0) return -std::numeric_limits<double>::infinity();
    return x[0];
  };
  VectorXd x0(1);
  x0 << -1e-30;
  const OptReport rep = maximize(f, x0);
  CHECK(rep.termination == Termination::kLineSearchFailure);
  CHECK(rep.argmax == x0);
}

TEST_CASE("non-finite start throws") {
  const Objective f = [](const VectorXd& x) { return std::log(x[0]); };
  VectorXd x0(1);
  x0 << -1.0;
  CHECK_THROWS_AS(maximize(f, x0), std::invalid_argument);
}

TEST_CASE("termination names") {
  CHECK(std::string(to_string(Termination::kGradient)) == "gradient");
  CHECK(std::string(to_string(Termination::kObjectiveChange)) ==
        "objective-change");
  CHECK(std::string(to_string(Termination::kMaxIterations)) ==
        "max-iterations");
  CHECK(std::string(to_string(Termination::kLineSearchFailure)) ==
        "line-search-failure");
}

TEST_CASE("fd_gradient matches a hand-differentiated function") {
  const Objective f = [](const VectorXd& x) {
    return x[0] * x[0] * x[1] + std::exp(x[1]);
  };
  VectorXd x(2);
  x << 1.5, -0.5;
  const VectorXd g = fd_gradient(f, x, 1e-6);
  CHECK(g[0] == doctest::Approx(2.0 * 1.5 * -0.5).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(1.5 * 1.5 + std::exp(-0.5)).epsilon(1e-8));
}

TEST_CASE("fd policies differ on a one-sided domain") {
  const Objective f = [](const VectorXd& x) { return std::log(x[0]); };
  VectorXd x(1);
  x << 1e-6;  // central step 1e-5 * max(1, |x|) crosses zero
  CHECK_THROWS_AS(fd_gradient(f, x, 1e-5, FdPolicy::kThrow),
                  std::runtime_error);
  const VectorXd g = fd_gradient(f, x, 1e-5, FdPolicy::kOneSided);
  CHECK(std::isfinite(g[0]));
  CHECK(g[0] > 0.0);
  // Error message of the throwing policy names the coordinate.
  try {
    fd_gradient(f, x, 1e-5, FdPolicy::kThrow);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("coordinate 0") != std::string::npos);
  }
}

TEST_CASE("fd_hessian is exact on quadratics and exactly symmetric") {
  const Quadratic q(4);
  const MatrixXd h =
      fd_hessian([&](const VectorXd& x) { return q(x); }, q.center, 1e-4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(h(i, j) == h(j, i));  // bitwise, by construction
      CHECK(h(i, j) == doctest::Approx(-q.a(i, j)).epsilon(1e-6));
    }
  }

  // Cross second derivative of x0^2 * x1 is 2 x0. Away from a stationary
  // point the second difference loses ~eps*|f|/h^2 to rounding, so the
  // tolerance is wider than in the quadratic case above.
  const Objective f = [](const VectorXd& x) { return x[0] * x[0] * x[1]; };
  VectorXd x(2);
  x << 2.0, 3.0;
  const MatrixXd hf = fd_hessian(f, x, 1e-5);
  CHECK(hf(0, 1) == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(hf(0, 0) == doctest::Approx(6.0).epsilon(1e-5));
  CHECK(hf(1, 1) == doctest::Approx(0.0).epsilon(1e-5));
}

}  // TEST_SUITE
