#pragma once

// Penalised trajectory optimisation over the intermediate waypoints and the
// total duration.

#include "tetherplan/cost_terms.hpp"
#include "tetherplan/lbfgs.hpp"
#include "tetherplan/scenario.hpp"
#include "tetherplan/trajectory.hpp"

#include <vector>

namespace tetherplan {

/// Unweighted terms plus the weighted total.
struct CostBreakdown {
  double smoothness = 0.0;
  double time = 0.0;  // T
  double velocity = 0.0;
  double acceleration = 0.0;
  double jerk = 0.0;
  double thrust = 0.0;
  double obstacle = 0.0;
  double cable = 0.0;
  double total = 0.0;

  double penalty_sum() const {
    return velocity + acceleration + jerk + thrust + obstacle + cable;
  }
};

/// Recomputes total from the terms with the given weights.
double weighted_total(const CostBreakdown& c, const PenaltyWeights& w, double rho);

struct CostEvaluation {
  CostBreakdown cost;
  UniformPolyTrajectory::Gradient gradient;
};

/// Objective value and its gradient with respect to the waypoints and T.
/// The trajectory must carry its gradient map (built by construct()).
CostEvaluation total_cost(const UniformPolyTrajectory& traj, const Scenario& scenario);

/// Same value without gradients; works on any trajectory.
CostBreakdown evaluate_cost(const UniformPolyTrajectory& traj, const Scenario& scenario);

struct IterationRecord {
  int iteration = 0;
  double step = 0.0;
  double duration = 0.0;
  CostBreakdown cost;
};

struct PlanResult {
  UniformPolyTrajectory trajectory;
  Eigen::Matrix3Xd waypoints;
  CostBreakdown cost;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;
  bool penalties_satisfied = false;
  std::vector<IterationRecord> history;
};

/// Straight-line initial waypoints and duration guess.
Eigen::Matrix3Xd initial_waypoints(const Scenario& scenario);
double initial_duration(const Scenario& scenario);

PlanResult optimize(const Scenario& scenario);

/// Builds the trajectory for explicit waypoints and duration.
UniformPolyTrajectory build_trajectory(const Scenario& scenario, const Eigen::Matrix3Xd& waypoints,
                                       double total_duration);

struct CorridorSample {
  double time = 0.0;
  double l_min = 0.0;
  double l_now = 0.0;
  double l_max = 0.0;
};

struct CorridorReport {
  std::vector<CorridorSample> samples;
  double max_squared_violation = 0.0;  // m^2
  double min_margin = 0.0;             // m, min(l_now - l_min, l_max - l_now); negative if violated
  bool passed = false;
};

/// Re-evaluates the corridor at `intervals` + 1 equally spaced times.
CorridorReport check_corridor(const UniformPolyTrajectory& traj, const Scenario& scenario,
                              int intervals, double tolerance = 1e-3);

}  // namespace tetherplan
