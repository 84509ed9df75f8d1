#include "tetherplan/cost_terms.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace tetherplan;
using doctest::Approx;

namespace {

// Single segment p(t) = c0 + c1 t + c2 t^2 (+ higher terms) on [0, T].
UniformPolyTrajectory single_segment(const Eigen::Matrix<double, 6, 3>& c, double T) {
  return UniformPolyTrajectory::from_coefficients(c, T);
}

UniformPolyTrajectory random_traj(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale), ut(1.0, 4.0);
  Eigen::Matrix3Xd q(3, n - 1);
  for (int c = 0; c < n - 1; ++c) q.col(c) = oracle::random_vec(rng, -scale, scale);
  BoundaryState start;
  start.position = oracle::random_vec(rng, -scale, scale);
  start.velocity = oracle::random_vec(rng, -scale, scale);
  start.acceleration = oracle::random_vec(rng, -scale, scale);
  return UniformPolyTrajectory::construct(q, ut(rng), start, oracle::random_vec(rng, -scale, scale),
                                          oracle::random_vec(rng, -scale, scale));
}

// Independent evaluation from raw coefficients.
Vec3 eval_raw(const Eigen::MatrixXd& c, double dt, double t, int order) {
  const int n = static_cast<int>(c.rows()) / 6;
  int seg = std::min(n - 1, static_cast<int>(std::floor(t / dt)));
  const double local = t - seg * dt;
  Vec3 out = Vec3::Zero();
  for (int k = order; k < 6; ++k) {
    double f = 1.0;
    for (int j = 0; j < order; ++j) f *= k - j;
    out += f * std::pow(local, k - order) * c.row(6 * seg + k).transpose();
  }
  return out;
}

using TermFn = std::function<TermValue(const UniformPolyTrajectory&)>;

// Relative error between the analytic coefficient/duration gradient of a
// term and central differences.
double gradient_error(const TermFn& term, const UniformPolyTrajectory& traj, double h) {
  const TermValue g = term(traj);
  const Eigen::MatrixXd c0 = traj.coefficients();
  const double dt0 = traj.segment_duration();
  Eigen::VectorXd analytic(c0.size() + 1), numeric(c0.size() + 1);
  for (Eigen::Index i = 0; i < c0.size(); ++i) {
    Eigen::MatrixXd cp = c0, cm = c0;
    cp.data()[i] += h;
    cm.data()[i] -= h;
    numeric(i) = (term(UniformPolyTrajectory::from_coefficients(cp, dt0)).value -
                  term(UniformPolyTrajectory::from_coefficients(cm, dt0)).value) /
                 (2 * h);
    analytic(i) = g.d_coefficients.data()[i];
  }
  numeric(c0.size()) = (term(UniformPolyTrajectory::from_coefficients(c0, dt0 + h)).value -
                        term(UniformPolyTrajectory::from_coefficients(c0, dt0 - h)).value) /
                       (2 * h);
  analytic(c0.size()) = g.d_segment_duration;
  return (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
}

}  // namespace

TEST_CASE("sample times") {
  CHECK(sample_times(0, 1, 2) == std::vector<double>{0, 0.5, 1});
  CHECK(sample_times(0, 2, 4) == std::vector<double>{0, 0.5, 1, 1.5, 2});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = a + 1.0 + std::abs(u(rng));
    const auto t = sample_times(a, b, 1 + i);
    CHECK(t.size() == static_cast<std::size_t>(i + 2));
    CHECK(t.front() == a);
    CHECK(t.back() == b);
  }
}

TEST_CASE("smoothness cost") {
  Eigen::Matrix<double, 6, 3> line = Eigen::Matrix<double, 6, 3>::Zero();
  line.row(0) << 1, 2, 3;
  line.row(1) << 0.5, -1, 0.2;
  CHECK(smoothness_cost(single_segment(line, 2.0)).value == 0.0);

  Eigen::Matrix<double, 6, 3> c;
  c << 0.1, -0.2, 0.3, 1, 0, -1, 0.5, 0.2, 0.1, -0.3, 0.4, 0.25, 0.05, -0.1, 0.02, 0.01, 0.03, -0.04;
  const double T = 1.7;
  const double quad = oracle::simpson(
      [&](double t) { return eval_raw(c, T, t, 3).squaredNorm(); }, 0.0, T, 10000);
  const double value = smoothness_cost(single_segment(c, T)).value;
  CHECK(value == Approx(quad).epsilon(1e-8));
  CHECK(smoothness_cost(single_segment(2.0 * c, T)).value == Approx(4.0 * value).epsilon(1e-14));

  std::mt19937_64 rng(2);
  for (int i = 0; i < 5; ++i) {
    CHECK(gradient_error([](const auto& t) { return smoothness_cost(t); }, random_traj(rng, 3, 1.0),
                         1e-6) < 1e-6);
  }
}

TEST_CASE("duration term") {
  std::mt19937_64 rng(3);
  const auto traj = random_traj(rng, 4, 1.0);
  const TermValue d = duration_cost(traj);
  CHECK(d.value == Approx(traj.total_duration()).epsilon(1e-15));
  CHECK(d.d_segment_duration == 4.0);
}

TEST_CASE("feasibility hinges") {
  Limits lim;
  lim.kappa = 8;
  Eigen::Matrix<double, 6, 3> slow = Eigen::Matrix<double, 6, 3>::Zero();
  slow.row(1) << 0.5, 0, 0.5;
  const FeasibilityTerms inactive = feasibility_penalty(single_segment(slow, 2.0), lim);
  CHECK(inactive.total() == 0.0);

  // Constant velocity with |v|^2 = v_max^2 + 1 at every one of the kappa + 1 samples.
  Eigen::Matrix<double, 6, 3> fast = Eigen::Matrix<double, 6, 3>::Zero();
  fast.row(1) << std::sqrt(lim.v_max * lim.v_max + 1.0), 0, 0;
  const FeasibilityTerms f = feasibility_penalty(single_segment(fast, 2.0), lim);
  CHECK(f.velocity.value / (lim.kappa + 1) == Approx(1.0).epsilon(1e-12));
  CHECK(f.acceleration.value == 0.0);
  CHECK(f.jerk.value == 0.0);
}

TEST_CASE("feasibility matches an independent re-sampling") {
  std::mt19937_64 rng(4);
  Limits lim;
  lim.v_max = 0.8;
  lim.a_max = 1.0;
  lim.j_max = 2.0;
  lim.kappa = 16;
  for (int trial = 0; trial < 10; ++trial) {
    const auto traj = random_traj(rng, 1 + trial % 4, 1.5);
    const double T = traj.total_duration(), dt = traj.segment_duration();
    double v = 0, a = 0, j = 0;
    for (int i = 0; i <= lim.kappa; ++i) {
      const double t = T * i / lim.kappa;
      v += hinge_cube(eval_raw(traj.coefficients(), dt, t, 1).squaredNorm() - lim.v_max * lim.v_max);
      a += hinge_cube(eval_raw(traj.coefficients(), dt, t, 2).squaredNorm() - lim.a_max * lim.a_max);
      j += hinge_cube(eval_raw(traj.coefficients(), dt, t, 3).squaredNorm() - lim.j_max * lim.j_max);
    }
    const FeasibilityTerms f = feasibility_penalty(traj, lim);
    CHECK(f.velocity.value == Approx(v).epsilon(1e-9));
    CHECK(f.acceleration.value == Approx(a).epsilon(1e-9));
    CHECK(f.jerk.value == Approx(j).epsilon(1e-9));

    CHECK(gradient_error([&](const auto& t) { return feasibility_penalty(t, lim).velocity; }, traj,
                         1e-6) < 1e-4);
    CHECK(gradient_error([&](const auto& t) { return feasibility_penalty(t, lim).acceleration; },
                         traj, 1e-6) < 1e-4);
    CHECK(gradient_error([&](const auto& t) { return feasibility_penalty(t, lim).jerk; }, traj,
                         1e-6) < 1e-4);
  }
}

TEST_CASE("thrust hinge") {
  Limits lim;
  lim.tau_min = 5.0;
  lim.tau_max = 15.0;
  lim.kappa = 4;
  const Vec3 g = gravity_vector();
  Eigen::Matrix<double, 6, 3> hover = Eigen::Matrix<double, 6, 3>::Zero();
  CHECK(thrust_penalty(single_segment(hover, 1.0), lim, g).value == 0.0);

  Eigen::Matrix<double, 6, 3> falling = Eigen::Matrix<double, 6, 3>::Zero();
  falling.row(2) = 0.5 * g.transpose();
  const double per_sample = std::pow(25.0, 3);
  CHECK(thrust_penalty(single_segment(falling, 1.0), lim, g).value / (lim.kappa + 1) ==
        Approx(per_sample).epsilon(1e-12));

  std::mt19937_64 rng(5);
  lim.tau_min = 9.0;
  lim.tau_max = 10.5;
  lim.kappa = 16;
  for (int trial = 0; trial < 5; ++trial) {
    const auto traj = random_traj(rng, 3, 1.5);
    CHECK(thrust_penalty(traj, lim, g).value > 0.0);
    CHECK(gradient_error([&](const auto& t) { return thrust_penalty(t, lim, g); }, traj, 1e-6) <
          1e-4);
  }
}

TEST_CASE("obstacle hinge") {
  const ObstaclePlane floor{Vec3::Zero(), Vec3::UnitZ()};
  CHECK(floor.signed_distance(Vec3(1, 0, 2)) == 2.0);

  const std::vector<ObstaclePlane> planes{floor};
  Eigen::Matrix<double, 6, 3> high = Eigen::Matrix<double, 6, 3>::Zero();
  high.row(0) << 1, 0, 2;
  CHECK(obstacle_penalty(single_segment(high, 1.0), planes, 0.3, 8).value == 0.0);

  Eigen::Matrix<double, 6, 3> low = Eigen::Matrix<double, 6, 3>::Zero();
  low.row(0) << 1, 0, 0.1;
  CHECK(obstacle_penalty(single_segment(low, 1.0), planes, 0.3, 8).value / 9 ==
        Approx(0.008).epsilon(1e-12));

  // Crossing trajectory shifted along the normal: penalty positive and falling.
  Eigen::Matrix<double, 6, 3> cross = Eigen::Matrix<double, 6, 3>::Zero();
  cross.row(0) << 0, 0, 1;
  cross.row(1) << 1, 0, -2;
  double previous = INFINITY;
  for (double shift = 0.0; shift < 1.0; shift += 0.1) {
    Eigen::Matrix<double, 6, 3> c = cross;
    c(0, 2) += shift;
    const double v = obstacle_penalty(single_segment(c, 1.0), planes, 0.3, 16).value;
    CHECK(v > 0.0);
    CHECK(v < previous);
    previous = v;
  }

  std::mt19937_64 rng(6);
  const std::vector<ObstaclePlane> tilted{{Vec3(0, 0, -0.5), Vec3(0.6, 0, 0.8)},
                                          {Vec3(0.5, 0, 0), Vec3(-1, 0, 0)}};
  for (int trial = 0; trial < 5; ++trial) {
    const auto traj = random_traj(rng, 3, 1.0);
    CHECK(gradient_error([&](const auto& t) { return obstacle_penalty(t, tilted, 0.3, 16); }, traj,
                         1e-6) < 1e-4);
  }
}

TEST_CASE("cable hinge") {
  CableProperties cable;
  cable.mass_per_length = 1.4e-4;
  cable.sag_limit = 0.1;
  const Vec3 anchor(0, 0, 3);
  WinchSchedule winch;
  winch.payout_speed = 0.0;
  winch.capacity = 100.0;

  Eigen::Matrix<double, 6, 3> below = Eigen::Matrix<double, 6, 3>::Zero();
  winch.initial_length = 3.05;
  CHECK(cable_penalty(single_segment(below, 2.0), anchor, winch, cable, 8).value == 0.0);

  // Droid at rest off to the side, winch holding L with L^2 - L_max^2 = 2.
  Eigen::Matrix<double, 6, 3> side = Eigen::Matrix<double, 6, 3>::Zero();
  side.row(0) << 2, 0, 0;
  const double l_max = max_length({2.0, 3.0}, cable);
  winch.initial_length = std::sqrt(l_max * l_max + 2.0);
  CHECK(cable_penalty(single_segment(side, 2.0), anchor, winch, cable, 8).value / 9 ==
        Approx(8.0).epsilon(1e-9));

  // Same droid with a cable shorter than the chord: L_min^2 - L^2 = 1.
  winch.initial_length = std::sqrt(13.0 - 1.0);
  CHECK(cable_penalty(single_segment(side, 2.0), anchor, winch, cable, 8).value / 9 ==
        Approx(1.0).epsilon(1e-9));

  // The margin tightens both sides of the corridor.
  winch.initial_length = std::sqrt(13.0) + 0.005;
  CHECK(cable_penalty(single_segment(side, 2.0), anchor, winch, cable, 8, 0.0).value == 0.0);
  CHECK(cable_penalty(single_segment(side, 2.0), anchor, winch, cable, 8, 0.01).value > 0.0);

  std::mt19937_64 rng(8);
  winch.initial_length = 3.0;
  winch.payout_speed = 0.3;
  for (int trial = 0; trial < 5; ++trial) {
    const auto traj = random_traj(rng, 3, 1.0);
    const double err = gradient_error(
        [&](const auto& t) { return cable_penalty(t, anchor, winch, cable, 16, 0.01); }, traj, 1e-5);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("max_length gradient") {
  CableProperties cable;
  cable.sag_limit = 0.1;
  const Vec3 anchor(-3, 0, 2.5);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const Vec3 p = oracle::random_vec(rng, -1.0, 2.0);
    const Vec3 g = max_length_gradient(p, anchor, cable);
    const double h = 1e-4;
    auto f = [&](const Vec3& x) {
      return max_length({std::abs(anchor.x() - x.x()), anchor.z() - x.z()}, cable);
    };
    // Fourth-order central difference as the reference.
    for (int axis : {0, 2}) {
      Vec3 e = Vec3::Zero();
      e(axis) = h;
      const double ref = (-f(p + 2 * e) + 8 * f(p + e) - 8 * f(p - e) + f(p - 2 * e)) / (12 * h);
      CHECK(g(axis) == Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("hinge penalties are C2 at activation") {
  // Velocity penalty of a constant-velocity segment scaled by s; the limit is
  // crossed at s = 1. Second differences on either side must agree.
  Limits lim;
  lim.v_max = 1.0;
  lim.kappa = 4;
  auto value = [&](double s) {
    Eigen::Matrix<double, 6, 3> c = Eigen::Matrix<double, 6, 3>::Zero();
    c.row(1) << s, 0, 0;
    return feasibility_penalty(single_segment(c, 1.0), lim).velocity.value;
  };
  // A C2 hinge has a second derivative that goes to zero at activation, so the
  // jump measured across it shrinks with the probe distance.
  auto jump = [&](double eps) {
    const double h = eps / 4;
    auto second = [&](double s) { return (value(s + h) - 2 * value(s) + value(s - h)) / (h * h); };
    return std::abs(second(1.0 + eps) - second(1.0 - eps));
  };
  CHECK(value(1.0 - 1e-6) == 0.0);
  CHECK(value(1.0 + 1e-6) > 0.0);
  const double coarse = jump(1e-2), fine = jump(1e-3);
  CHECK(fine < 0.2 * coarse);
  CHECK(fine / (lim.kappa + 1) < 0.1);
}
