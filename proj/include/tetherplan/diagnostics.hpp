#pragma once

// Self-checks behind `tetherplan check`: independent re-derivations of the
// catenary, the trajectory map, the objective gradient and the hinge
// penalties, run on small randomised instances.

#include "tetherplan/optimizer.hpp"
#include "tetherplan/scenario.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tetherplan {

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;     // worst observed error
  double threshold = 0.0;  // pass iff metric < threshold
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  int catenary_instances = 100;
  int trajectory_instances = 20;
  int gradient_instances = 10;
  /// Relative scale error injected into the analytic gradient; values above
  /// the 1e-4 tolerance must make the gradient check fail.
  double gradient_perturbation = 0.0;
};

std::vector<CheckResult> run_checks(const Scenario& base, const CheckOptions& options);

/// Coefficients from a dense solve of the same boundary, interpolation and
/// C^4 conditions the banded construction uses (row order differs).
Eigen::MatrixXd dense_trajectory_coefficients(const Eigen::Matrix3Xd& waypoints, double total_duration,
                                              const BoundaryState& start, const Vec3& goal_position,
                                              const Vec3& goal_velocity);

struct GradientComparison {
  Eigen::VectorXd analytic;  // [vec(dJ/dq); dJ/dT]
  Eigen::VectorXd numeric;
  double relative_error = 0.0;  // |analytic - numeric| / |numeric|
};

/// Central differences of the total cost in the waypoints and T.
GradientComparison compare_gradient(const Scenario& scenario, const Eigen::Matrix3Xd& waypoints,
                                    double total_duration, double step = 1e-6,
                                    double perturbation = 0.0);

/// Four-segment instance with random boundary data, tight limits and a
/// nearby anchor so that most hinge penalties are active.
struct GradientInstance {
  Scenario scenario;
  Eigen::Matrix3Xd waypoints;
  double total_duration = 0.0;
};
GradientInstance random_gradient_instance(std::mt19937_64& rng, const Scenario& base);

}  // namespace tetherplan
