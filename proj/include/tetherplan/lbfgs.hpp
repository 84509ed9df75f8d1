#pragma once

// Limited-memory BFGS with a bracketing weak-Wolfe line search. The weak
// conditions tolerate the kinks the hinge penalties introduce in higher
// derivatives.

#include <Eigen/Core>

#include <functional>

namespace tetherplan {

struct LbfgsParams {
  int memory = 8;
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;  // on |g| / max(1, |x|)
  double relative_tolerance = 0.0;   // stop when the cost stalls; 0 disables
  int max_linesearch = 60;
  double armijo = 1e-4;
  double curvature = 0.9;
};

enum class LbfgsStatus { Converged, MaxIterations, LineSearchFailure };

const char* to_string(LbfgsStatus status) noexcept;

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
};

/// Returns f(x) and writes the gradient. A non-finite value marks x as
/// infeasible; the line search then shortens the step.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Called after every accepted step.
using IterationCallback =
    std::function<void(int iteration, const Eigen::VectorXd& x, double value, double step)>;

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsParams& params = {},
                           const IterationCallback& on_iteration = {});

}  // namespace tetherplan
