#include "tetherplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tetherplan {
namespace {

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Terms {
  TermValue smoothness, time;
  FeasibilityTerms feasibility;
  TermValue thrust, obstacle, cable;
};

Terms compute_terms(const UniformPolyTrajectory& traj, const Scenario& sc) {
  Terms t;
  t.smoothness = smoothness_cost(traj);
  t.time = duration_cost(traj);
  t.feasibility = feasibility_penalty(traj, sc.limits);
  t.thrust = thrust_penalty(traj, sc.limits, sc.gravity());
  t.obstacle = obstacle_penalty(traj, sc.obstacles, sc.limits.obstacle_margin, sc.limits.kappa);
  t.cable = sc.cable_constraint
                ? cable_penalty(traj, sc.anchor, sc.winch, sc.cable, sc.limits.kappa,
                                sc.limits.corridor_margin)
                : TermValue::zero(traj);
  return t;
}

CostBreakdown breakdown(const Terms& t, const Scenario& sc) {
  CostBreakdown c;
  c.smoothness = t.smoothness.value;
  c.time = t.time.value;
  c.velocity = t.feasibility.velocity.value;
  c.acceleration = t.feasibility.acceleration.value;
  c.jerk = t.feasibility.jerk.value;
  c.thrust = t.thrust.value;
  c.obstacle = t.obstacle.value;
  c.cable = t.cable.value;
  c.total = weighted_total(c, sc.weights, sc.limits.rho);
  return c;
}

}  // namespace

double weighted_total(const CostBreakdown& c, const PenaltyWeights& w, double rho) {
  return c.smoothness + rho * c.time + w.velocity * c.velocity +
         w.dynamics * (c.acceleration + c.jerk) + w.thrust * c.thrust +
         w.obstacle * c.obstacle + w.cable * c.cable;
}

CostBreakdown evaluate_cost(const UniformPolyTrajectory& traj, const Scenario& scenario) {
  return breakdown(compute_terms(traj, scenario), scenario);
}

CostEvaluation total_cost(const UniformPolyTrajectory& traj, const Scenario& sc) {
  const Terms t = compute_terms(traj, sc);
  TermValue sum = TermValue::zero(traj);
  sum.add_scaled(t.smoothness, 1.0);
  sum.add_scaled(t.time, sc.limits.rho);
  sum.add_scaled(t.feasibility.velocity, sc.weights.velocity);
  sum.add_scaled(t.feasibility.acceleration, sc.weights.dynamics);
  sum.add_scaled(t.feasibility.jerk, sc.weights.dynamics);
  sum.add_scaled(t.thrust, sc.weights.thrust);
  sum.add_scaled(t.obstacle, sc.weights.obstacle);
  sum.add_scaled(t.cable, sc.weights.cable);

  CostEvaluation out;
  out.cost = breakdown(t, sc);
  out.gradient = traj.propagate_gradients(sum.d_coefficients, sum.d_segment_duration);
  return out;
}

UniformPolyTrajectory build_trajectory(const Scenario& sc, const Eigen::Matrix3Xd& waypoints,
                                       double total_duration) {
  return UniformPolyTrajectory::construct(waypoints, total_duration, sc.start, sc.goal_position,
                                          sc.goal_velocity);
}

Eigen::Matrix3Xd initial_waypoints(const Scenario& sc) {
  const int n = sc.segments;
  Eigen::Matrix3Xd q(3, n - 1);
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    q.col(i - 1) = (1.0 - s) * sc.start.position + s * sc.goal_position;
  }
  return q;
}

double initial_duration(const Scenario& sc) {
  const PlannerSettings& ps = sc.planner;
  if (ps.fixed_duration) return *ps.fixed_duration;
  if (ps.initial_duration > 0.0) return std::max(ps.initial_duration, ps.min_duration + 1e-3);

  // A rest-to-rest minimum-jerk move peaks at 1.875 times the mean speed.
  const double distance = (sc.goal_position - sc.start.position).norm();
  double guess = std::max(2.0 * distance / sc.limits.v_max, 1.0);

  // Let the winch reach the middle of the goal corridor.
  if (sc.cable_constraint && sc.winch.payout_speed != 0.0) {
    const Vec3 attach = attachment_point(sc.goal_position, sc.cable);
    const double lo = min_length(attach, sc.anchor);
    const double hi = max_length(planar_configuration(attach, sc.anchor), sc.cable);
    const double t_mid = (0.5 * (lo + hi) - sc.winch.initial_length) / sc.winch.payout_speed;
    if (t_mid > 0.0) guess = t_mid;
  }
  return std::max(guess, ps.min_duration + 0.5);
}

PlanResult optimize(const Scenario& sc) {
  sc.validate();
  const PlannerSettings& ps = sc.planner;
  const int n = sc.segments;
  const int nq = 3 * (n - 1);
  const bool free_time = !ps.fixed_duration.has_value();

  Eigen::VectorXd x0(nq + (free_time ? 1 : 0));
  {
    const Eigen::Matrix3Xd q = initial_waypoints(sc);
    x0.head(nq) = Eigen::Map<const Eigen::VectorXd>(q.data(), nq);
    if (free_time) x0(nq) = softplus_inverse(initial_duration(sc) - ps.min_duration);
  }

  auto unpack = [&](const Eigen::VectorXd& x, Eigen::Matrix3Xd& q, double& T) {
    q = Eigen::Map<const Eigen::Matrix3Xd>(x.data(), 3, n - 1);
    T = free_time ? ps.min_duration + softplus(x(nq)) : *ps.fixed_duration;
  };

  CostBreakdown last_cost;
  double last_duration = 0.0;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    Eigen::Matrix3Xd q;
    double T = 0.0;
    unpack(x, q, T);
    try {
      const UniformPolyTrajectory traj = build_trajectory(sc, q, T);
      const CostEvaluation ev = total_cost(traj, sc);
      g.head(nq) = Eigen::Map<const Eigen::VectorXd>(ev.gradient.waypoints.data(), nq);
      if (free_time) g(nq) = ev.gradient.total_duration * sigmoid(x(nq));
      last_cost = ev.cost;
      last_duration = T;
      return ev.cost.total;
    } catch (const Error&) {
      g.setZero();
      return std::numeric_limits<double>::infinity();
    }
  };

  PlanResult result;
  {
    Eigen::VectorXd g0(x0.size());
    objective(x0, g0);
    result.history.push_back({0, 0.0, last_duration, last_cost});
  }
  auto on_iteration = [&](int it, const Eigen::VectorXd&, double, double step) {
    result.history.push_back({it, step, last_duration, last_cost});
  };

  LbfgsParams lp;
  lp.memory = ps.memory;
  lp.max_iterations = ps.max_iterations;
  lp.gradient_tolerance = ps.gradient_tolerance;
  const LbfgsResult lr = minimize_lbfgs(objective, x0, lp, on_iteration);

  double T = 0.0;
  unpack(lr.x, result.waypoints, T);
  result.trajectory = build_trajectory(sc, result.waypoints, T);
  result.cost = evaluate_cost(result.trajectory, sc);
  result.status = lr.status;
  result.iterations = lr.iterations;
  result.evaluations = lr.evaluations;
  result.gradient_norm = lr.gradient_norm;
  result.penalties_satisfied = result.cost.penalty_sum() <= ps.penalty_tolerance;
  return result;
}

CorridorReport check_corridor(const UniformPolyTrajectory& traj, const Scenario& sc, int intervals,
                              double tolerance) {
  if (intervals < 1) throw Error(ErrorCode::InvalidArgument, "need at least one interval");
  CorridorReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double T = traj.total_duration();
  rep.samples.reserve(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double t = (i == intervals) ? T : T * i / intervals;
    const CableBounds b =
        cable_bounds(traj.evaluate(t), sc.anchor, sc.winch.length_at(t), sc.cable);
    rep.samples.push_back({t, b.l_min, b.l_now, b.l_max});
    rep.max_squared_violation = std::max(rep.max_squared_violation, b.squared_violation());
    rep.min_margin = std::min({rep.min_margin, b.l_now - b.l_min, b.l_max - b.l_now});
  }
  rep.passed = rep.max_squared_violation < tolerance;
  return rep;
}

}  // namespace tetherplan
