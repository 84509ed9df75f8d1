#include "tetherplan/optimizer.hpp"
#include "tetherplan/scenario.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace tetherplan;
using doctest::Approx;

namespace {

Scenario pickup(double z) {
  Scenario sc;
  sc.name = "pickup";
  sc.goal_position = Vec3(2.0, 0.0, z);
  sc.anchor = Vec3(-3.0, 0.0, 2.5);
  sc.cable.mass_per_length = 1.4e-4;
  sc.cable.sag_limit = 0.1;
  sc.winch.payout_speed = 0.2;
  sc.auto_initial_length = true;
  derive_initial_length(sc);
  return sc;
}

// Four segments, tight limits and a close anchor so that most hinges fire.
Scenario active_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Scenario sc;
  sc.segments = 4;
  sc.start.position = Vec3(u(rng), 0.0, u(rng));
  sc.start.velocity = Vec3(u(rng), 0.0, u(rng));
  sc.start.acceleration = Vec3(u(rng), 0.0, u(rng));
  sc.goal_position = Vec3(2.0 + u(rng), 0.0, u(rng));
  sc.goal_velocity = Vec3(0.3 * u(rng), 0.0, 0.3 * u(rng));
  sc.limits.v_max = 0.8;
  sc.limits.a_max = 2.0;
  sc.limits.j_max = 8.0;
  sc.limits.tau_min = 9.6;
  sc.limits.tau_max = 10.1;
  sc.limits.kappa = 16;
  sc.obstacles = {ObstaclePlane{Vec3(0, 0, -0.8), Vec3::UnitZ()}};
  sc.anchor = Vec3(-3.5 + 0.5 * u(rng), 0.0, 2.5 + 0.5 * u(rng));
  sc.winch.capacity = 100.0;
  sc.winch.stow_length = 0.0;
  sc.winch.payout_speed = 0.4 * u(rng);
  sc.winch.initial_length = min_length(sc.start.position, sc.anchor) + 0.05 * u(rng);
  return sc;
}

Eigen::Matrix3Xd random_waypoints(std::mt19937_64& rng, const Scenario& sc) {
  Eigen::Matrix3Xd q = initial_waypoints(sc);
  std::normal_distribution<double> n(0.0, 0.3);
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    q(0, c) += n(rng);
    q(2, c) += n(rng);
  }
  return q;
}

}  // namespace

TEST_CASE("zero weights reduce the objective to smoothness plus time") {
  std::mt19937_64 rng(1);
  Scenario sc = active_scenario(rng);
  sc.weights = PenaltyWeights{0, 0, 0, 0, 0};
  const auto traj = build_trajectory(sc, random_waypoints(rng, sc), 3.0);
  const CostBreakdown c = evaluate_cost(traj, sc);
  CHECK(c.total == Approx(c.smoothness + sc.limits.rho * 3.0).epsilon(1e-12));
  CHECK(c.penalty_sum() > 0.0);
}

TEST_CASE("breakdown sums to the total") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    const Scenario sc = active_scenario(rng);
    const CostBreakdown c = evaluate_cost(build_trajectory(sc, random_waypoints(rng, sc), 3.0), sc);
    const PenaltyWeights& w = sc.weights;
    const double sum = c.smoothness + sc.limits.rho * c.time + w.velocity * c.velocity +
                       w.dynamics * (c.acceleration + c.jerk) + w.thrust * c.thrust +
                       w.obstacle * c.obstacle + w.cable * c.cable;
    CHECK(c.total == Approx(sum).epsilon(1e-12));
    CHECK(weighted_total(c, w, sc.limits.rho) == Approx(c.total).epsilon(1e-12));
    for (double p : {c.velocity, c.acceleration, c.jerk, c.thrust, c.obstacle, c.cable}) {
      CHECK(p >= 0.0);
    }
  }
}

TEST_CASE("penalties do not depend on the weights") {
  std::mt19937_64 rng(3);
  Scenario sc = active_scenario(rng);
  const auto traj = build_trajectory(sc, random_waypoints(rng, sc), 3.0);
  const CostBreakdown a = evaluate_cost(traj, sc);
  sc.weights.velocity *= 7;
  sc.weights.dynamics *= 7;
  sc.weights.thrust *= 7;
  sc.weights.cable *= 7;
  sc.weights.obstacle *= 7;
  const CostBreakdown b = evaluate_cost(traj, sc);
  CHECK(a.penalty_sum() == b.penalty_sum());
  CHECK(a.smoothness == b.smoothness);
}

TEST_CASE("analytic objective gradient matches central differences") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const Scenario sc = active_scenario(rng);
    const Eigen::Matrix3Xd q = random_waypoints(rng, sc);
    const double T = 2.5 + i * 0.2;
    const CostEvaluation ev = total_cost(build_trajectory(sc, q, T), sc);
    auto J = [&](const Eigen::Matrix3Xd& qq, double TT) {
      return evaluate_cost(build_trajectory(sc, qq, TT), sc).total;
    };
    const double h = 1e-6;
    const int nq = static_cast<int>(q.size());
    Eigen::VectorXd analytic(nq + 1), numeric(nq + 1);
    for (int k = 0; k < nq; ++k) {
      Eigen::Matrix3Xd qp = q, qm = q;
      qp.data()[k] += h;
      qm.data()[k] -= h;
      numeric(k) = (J(qp, T) - J(qm, T)) / (2 * h);
      analytic(k) = ev.gradient.waypoints.data()[k];
    }
    numeric(nq) = (J(q, T + h) - J(q, T - h)) / (2 * h);
    analytic(nq) = ev.gradient.total_duration;
    CAPTURE(i);
    CHECK(ev.cost.penalty_sum() > 0.0);
    CHECK((analytic - numeric).norm() <= 1e-4 * numeric.norm());
  }
}

TEST_CASE("unconstrained plan approaches the single-segment optimum") {
  Scenario sc;
  sc.goal_position = Vec3(2, 0, 0);
  sc.cable_constraint = false;
  sc.limits.v_max = 100;
  sc.limits.a_max = 100;
  sc.limits.j_max = 1000;
  sc.limits.tau_max = 1000;
  const PlanResult r = optimize(sc);
  CHECK(r.penalties_satisfied);
  const double T = r.trajectory.total_duration();
  BoundaryState start;
  const auto single =
      UniformPolyTrajectory::construct(Eigen::Matrix3Xd(3, 0), T, start, sc.goal_position, Vec3::Zero());
  const double reference = evaluate_cost(single, sc).smoothness;
  CHECK(r.cost.smoothness == Approx(reference).epsilon(0.01));
  for (Eigen::Index c = 0; c < r.waypoints.cols(); ++c) {
    CHECK(std::abs(r.waypoints(1, c)) < 1e-6);
    CHECK(std::abs(r.waypoints(2, c)) < 1e-6);
  }
}

TEST_CASE("goal equal to start collapses to the shortest duration") {
  Scenario sc;
  sc.cable_constraint = false;
  const PlanResult r = optimize(sc);
  CHECK(r.cost.penalty_sum() == 0.0);
  CHECK(r.cost.smoothness < 1e-8);
  CHECK(r.trajectory.total_duration() < sc.planner.min_duration + 0.05);
  for (double t : {0.0, 0.25, 0.5}) {
    CHECK(r.trajectory.evaluate(t * r.trajectory.total_duration()).norm() < 1e-6);
  }
}

TEST_CASE("fixed-duration mode keeps T") {
  Scenario sc = pickup(1.0);
  sc.planner.fixed_duration = 6.0;
  const PlanResult r = optimize(sc);
  CHECK(r.trajectory.total_duration() == Approx(6.0).epsilon(1e-12));
}

TEST_CASE("optimisation never increases the cost between recorded iterations") {
  const PlanResult r = optimize(pickup(2.0));
  REQUIRE(r.history.size() > 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i].cost.total <= r.history[i - 1].cost.total);
  }
}

TEST_CASE("pickup plans keep the cable inside the corridor") {
  for (double z : {0.0, 1.0, 2.0}) {
    const Scenario sc = pickup(z);
    const PlanResult r = optimize(sc);
    CAPTURE(z);
    CHECK(r.penalties_satisfied);
    CHECK((r.trajectory.evaluate(r.trajectory.total_duration()) - sc.goal_position).norm() < 1e-9);
    const CorridorReport dense = check_corridor(r.trajectory, sc, 10 * sc.limits.kappa);
    CHECK(dense.passed);
    CHECK(dense.max_squared_violation < 1e-3);
    CHECK(dense.samples.size() == static_cast<std::size_t>(10 * sc.limits.kappa + 1));
    for (const CorridorSample& s : dense.samples) {
      CHECK(s.l_min <= s.l_now + 1e-9);
      CHECK(s.l_now <= s.l_max + 1e-9);
    }
  }
}

TEST_CASE("corridor check flags an over-taut cable") {
  Scenario sc = pickup(0.0);
  sc.winch.payout_speed = 0.0;
  sc.winch.initial_length = 3.0;  // shorter than the chord to the goal
  const auto traj = build_trajectory(sc, initial_waypoints(sc), 4.0);
  const CorridorReport rep = check_corridor(traj, sc, 64);
  CHECK_FALSE(rep.passed);
  CHECK(rep.min_margin < 0.0);
  CHECK(rep.max_squared_violation > 1e-3);
}

TEST_CASE("initial guess is a straight line") {
  Scenario sc = pickup(2.0);
  const Eigen::Matrix3Xd q = initial_waypoints(sc);
  CHECK(q.cols() == sc.segments - 1);
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const double s = static_cast<double>(c + 1) / sc.segments;
    CHECK((q.col(c) - (sc.start.position + s * (sc.goal_position - sc.start.position))).norm() <
          1e-12);
  }
  CHECK(initial_duration(sc) > sc.planner.min_duration);
}
