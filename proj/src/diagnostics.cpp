#include "tetherplan/diagnostics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tetherplan {
namespace {

// Coefficient of c_j in the k-th derivative of sum c_j t^j.
double derivative_weight(int j, int k, double t) {
  if (j < k) return 0.0;
  double w = 1.0;
  for (int m = 0; m < k; ++m) w *= j - m;
  for (int m = 0; m < j - k; ++m) w *= t;
  return w;
}

double simpson(const auto& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult make(std::string name, double metric, double threshold, std::string detail) {
  return {std::move(name), metric < threshold, metric, threshold, std::move(detail)};
}

CheckResult catenary_arc_length(std::mt19937_64& rng, const Scenario& base, int count) {
  std::uniform_real_distribution<double> up(0.1, 5.0), uh(-2.0, 2.0), ul(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const PlanarConfiguration cfg{up(rng), uh(rng)};
    const double chord = chord_length(cfg);
    const double length = chord + 3.0 * std::max(ul(rng), 1e-3);
    const CatenarySolution s = solve_catenary(cfg, length, base.cable);
    const double quad = simpson([&](double x) { return std::cosh(x / s.a); }, s.x_a, s.x_b, 4000);
    worst = std::max(worst, std::abs(quad - length) / length);
  }
  return make("catenary arc length vs quadrature", worst, 1e-6,
              std::to_string(count) + " random spans");
}

CheckResult catenary_endpoints(std::mt19937_64& rng, const Scenario& base, int count) {
  std::uniform_real_distribution<double> up(0.1, 5.0), uh(-2.0, 2.0), ul(1e-3, 3.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const PlanarConfiguration cfg{up(rng), uh(rng)};
    const double length = chord_length(cfg) + ul(rng);
    const CatenarySolution s = solve_catenary(cfg, length, base.cable);
    const double span_err = std::abs(s.span() - cfg.p);
    const double rise_err = std::abs(s.rise() - cfg.H);
    const double len_err =
        std::abs(s.a * (std::sinh(s.x_b / s.a) - std::sinh(s.x_a / s.a)) - length);
    worst = std::max({worst, span_err, rise_err, len_err});
  }
  return make("catenary endpoint residuals", worst, 1e-9, "span, rise and length equations");
}

CheckResult catenary_taut_limit(const Scenario& base) {
  const PlanarConfiguration cfg{3.0, 1.0};
  const double chord = chord_length(cfg);
  double previous = INFINITY;
  double worst_increase = 0.0;
  double last = 0.0;
  // Sag grows like the square root of the slack, so the slack has to get tiny.
  for (int k = 0; k < 10; ++k) {
    const double length = chord + std::pow(0.1, k);
    last = max_sag_below_chord(solve_catenary(cfg, length, base.cable));
    worst_increase = std::max(worst_increase, last - previous);
    previous = last;
  }
  const bool ok = worst_increase <= 0.0 && last < 1e-3;
  return {"catenary sag vanishes as the cable tightens", ok, last, 1e-3,
          ok ? "monotone" : "sag not monotone"};
}

CheckResult max_length_depth(std::mt19937_64& rng, const Scenario& base, int count) {
  std::uniform_real_distribution<double> up(0.1, 5.0), uh(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const PlanarConfiguration cfg{up(rng), uh(rng)};
    const CatenarySolution s = max_length_catenary(cfg, base.cable);
    worst = std::max(worst, std::abs(sag_below_lower_endpoint(s) - base.cable.sag_limit));
  }
  return make("sag-limited catenary depth", worst, 1e-9, "vertex depth equals the sag limit");
}

CheckResult trajectory_oracle(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), ut(0.5, 6.0);
  std::uniform_int_distribution<int> un(1, 8);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = un(rng);
    BoundaryState start;
    start.position = Vec3(u(rng), u(rng), u(rng));
    start.velocity = Vec3(u(rng), u(rng), u(rng));
    start.acceleration = Vec3(u(rng), u(rng), u(rng));
    const Vec3 goal(u(rng), u(rng), u(rng));
    const Vec3 goal_vel(u(rng), u(rng), u(rng));
    Eigen::Matrix3Xd q(3, n - 1);
    for (int c = 0; c < n - 1; ++c) q.col(c) = Vec3(u(rng), u(rng), u(rng));
    const double T = ut(rng);
    const auto traj = UniformPolyTrajectory::construct(q, T, start, goal, goal_vel);
    const Eigen::MatrixXd dense = dense_trajectory_coefficients(q, T, start, goal, goal_vel);
    const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    worst = std::max(worst, (traj.coefficients() - dense).cwiseAbs().maxCoeff() / scale);
  }
  return make("trajectory map vs dense solve", worst, 1e-9,
              std::to_string(count) + " random instances, N <= 8");
}

CheckResult gradient_check(std::mt19937_64& rng, const Scenario& base, int count,
                           double perturbation) {
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const GradientInstance inst = random_gradient_instance(rng, base);
    const GradientComparison cmp =
        compare_gradient(inst.scenario, inst.waypoints, inst.total_duration, 1e-6, perturbation);
    worst = std::max(worst, cmp.relative_error);
  }
  return make("objective gradient vs central differences", worst, 1e-4,
              std::to_string(count) + " random 4-segment instances");
}

// A constant-velocity segment scaled by s crosses the speed limit at s = 1;
// the second differences of the penalty must not jump there.
CheckResult hinge_continuity(const Scenario& base) {
  Limits lim = base.limits;
  lim.v_max = 1.0;
  const double h = 1e-4;
  auto penalty = [&](double s) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 3);
    c(1, 0) = s;
    return feasibility_penalty(UniformPolyTrajectory::from_coefficients(c, 1.0), lim).total();
  };
  double worst_jump = 0.0;
  double prev_d2 = NAN;
  for (double s = 0.99; s <= 1.01; s += h) {
    const double d2 = (penalty(s + h) - 2.0 * penalty(s) + penalty(s - h)) / (h * h);
    if (!std::isnan(prev_d2)) worst_jump = std::max(worst_jump, std::abs(d2 - prev_d2));
    prev_d2 = d2;
  }
  worst_jump /= (lim.kappa + 1);
  return make("hinge second differences continuous", worst_jump, 0.1,
              "per-sample jump of the second difference across activation");
}

CheckResult hinge_identities(const Scenario& base) {
  Limits lim = base.limits;
  lim.kappa = 2;
  double worst = 0.0;

  // |v|^2 = v_max^2 + 1 at every sample.
  {
    Limits l = lim;
    l.v_max = 2.0;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 3);
    c(1, 0) = 1.0;
    c(1, 1) = 2.0;
    const double v = feasibility_penalty(UniformPolyTrajectory::from_coefficients(c, 1.0), l)
                         .velocity.value;
    worst = std::max(worst, std::abs(v / (l.kappa + 1) - 1.0));
  }
  // L_now^2 - L_max^2 = 2 below a vertical cable.
  {
    CableProperties props = base.cable;
    props.sag_limit = 0.5;
    props.attachment_offset = 0.0;
    WinchSchedule w;
    w.initial_length = std::sqrt(6.0);
    w.payout_speed = 0.0;
    w.stow_length = 0.0;
    w.capacity = 10.0;
    const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 3);
    const TermValue v = cable_penalty(UniformPolyTrajectory::from_coefficients(c, 1.0),
                                   Vec3(0.0, 0.0, 1.5), w, props, lim.kappa);
    worst = std::max(worst, std::abs(v.value / (lim.kappa + 1) - 8.0));
  }
  // Signed distance 0.1 against a 0.3 m margin.
  {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 3);
    c(0, 2) = 0.1;
    const ObstaclePlane floor{Vec3::Zero(), Vec3::UnitZ()};
    const double v = obstacle_penalty(UniformPolyTrajectory::from_coefficients(c, 1.0),
                                      std::span(&floor, 1), 0.3, lim.kappa)
                         .value;
    worst = std::max(worst, std::abs(v / (lim.kappa + 1) - 0.008));
  }
  return make("hinge unit identities (1, 8, 0.008)", worst, 1e-12, "per-sample contributions");
}

}  // namespace

Eigen::MatrixXd dense_trajectory_coefficients(const Eigen::Matrix3Xd& waypoints, double total_duration,
                                              const BoundaryState& start, const Vec3& goal_position,
                                              const Vec3& goal_velocity) {
  const int n = static_cast<int>(waypoints.cols()) + 1;
  const int dim = 6 * n;
  const double dt = total_duration / n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, 3);
  int row = 0;
  auto put = [&](int seg, int order, double t, double sign) {
    for (int j = 0; j < 6; ++j) a(row, 6 * seg + j) += sign * derivative_weight(j, order, t);
  };

  for (int k = 0; k < 3; ++k, ++row) {
    put(0, k, 0.0, 1.0);
    const Vec3& v = k == 0 ? start.position : (k == 1 ? start.velocity : start.acceleration);
    b.row(row) = v.transpose();
  }
  for (int i = 0; i + 1 < n; ++i) {
    put(i, 0, dt, 1.0);
    b.row(row++) = waypoints.col(i).transpose();
    put(i + 1, 0, 0.0, 1.0);
    b.row(row++) = waypoints.col(i).transpose();
    for (int k = 1; k <= 4; ++k, ++row) {
      put(i, k, dt, 1.0);
      put(i + 1, k, 0.0, -1.0);
    }
  }
  put(n - 1, 0, dt, 1.0);
  b.row(row++) = goal_position.transpose();
  put(n - 1, 1, dt, 1.0);
  b.row(row++) = goal_velocity.transpose();
  put(n - 1, 3, dt, 1.0);
  ++row;
  return a.fullPivLu().solve(b);
}

GradientComparison compare_gradient(const Scenario& sc, const Eigen::Matrix3Xd& waypoints,
                                    double total_duration, double step, double perturbation) {
  const int nq = static_cast<int>(waypoints.size());
  GradientComparison out;
  out.analytic.resize(nq + 1);
  out.numeric.resize(nq + 1);

  const CostEvaluation ev = total_cost(build_trajectory(sc, waypoints, total_duration), sc);
  out.analytic.head(nq) = Eigen::Map<const Eigen::VectorXd>(ev.gradient.waypoints.data(), nq);
  out.analytic(nq) = ev.gradient.total_duration;
  out.analytic *= 1.0 + perturbation;

  auto cost = [&](const Eigen::Matrix3Xd& q, double T) {
    return evaluate_cost(build_trajectory(sc, q, T), sc).total;
  };
  for (int i = 0; i < nq; ++i) {
    Eigen::Matrix3Xd qp = waypoints, qm = waypoints;
    qp.data()[i] += step;
    qm.data()[i] -= step;
    out.numeric(i) = (cost(qp, total_duration) - cost(qm, total_duration)) / (2.0 * step);
  }
  out.numeric(nq) = (cost(waypoints, total_duration + step) - cost(waypoints, total_duration - step)) /
                    (2.0 * step);
  out.relative_error =
      (out.analytic - out.numeric).norm() / std::max(out.numeric.norm(), 1e-300);
  return out;
}

GradientInstance random_gradient_instance(std::mt19937_64& rng, const Scenario& base) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), u01(0.0, 1.0);
  GradientInstance inst;
  Scenario& sc = inst.scenario;
  sc = base;
  sc.segments = 4;
  sc.start.position = Vec3(u(rng), 0.0, u(rng));
  sc.start.velocity = Vec3(u(rng), 0.0, u(rng));
  sc.start.acceleration = Vec3(u(rng), 0.0, u(rng));
  sc.goal_position = Vec3(1.0 + u(rng), 0.0, u(rng));
  sc.goal_velocity = 0.3 * Vec3(u(rng), 0.0, u(rng));
  sc.anchor = Vec3(-3.0 - u01(rng), 0.0, 2.0 + u01(rng));

  sc.limits.v_max = 0.8;
  sc.limits.a_max = 2.0;
  sc.limits.j_max = 8.0;
  sc.limits.tau_min = 9.6;
  sc.limits.tau_max = 10.1;
  sc.obstacles = {ObstaclePlane{Vec3(0.0, 0.0, -0.8), Vec3::UnitZ()}};

  sc.winch.capacity = 100.0;
  sc.winch.stow_length = 0.0;
  sc.winch.payout_speed = 0.4 * u(rng);
  const double chord = min_length(attachment_point(sc.start.position, sc.cable), sc.anchor);
  sc.winch.initial_length = chord * (1.0 + 0.05 * u(rng));
  sc.cable_constraint = true;

  inst.total_duration = 1.5 + 2.5 * u01(rng);
  inst.waypoints.resize(3, sc.segments - 1);
  for (int i = 1; i < sc.segments; ++i) {
    const double s = static_cast<double>(i) / sc.segments;
    inst.waypoints.col(i - 1) = (1.0 - s) * sc.start.position + s * sc.goal_position +
                                0.3 * Vec3(u(rng), 0.0, u(rng));
  }
  return inst;
}

std::vector<CheckResult> run_checks(const Scenario& base, const CheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, INFINITY, 0.0, e.what()});
    }
  };
  guarded("catenary arc length vs quadrature",
          [&] { return catenary_arc_length(rng, base, opt.catenary_instances); });
  guarded("catenary endpoint residuals",
          [&] { return catenary_endpoints(rng, base, opt.catenary_instances); });
  guarded("catenary sag vanishes as the cable tightens", [&] { return catenary_taut_limit(base); });
  guarded("sag-limited catenary depth",
          [&] { return max_length_depth(rng, base, opt.catenary_instances); });
  guarded("trajectory map vs dense solve",
          [&] { return trajectory_oracle(rng, opt.trajectory_instances); });
  guarded("objective gradient vs central differences", [&] {
    return gradient_check(rng, base, opt.gradient_instances, opt.gradient_perturbation);
  });
  guarded("hinge second differences continuous", [&] { return hinge_continuity(base); });
  guarded("hinge unit identities (1, 8, 0.008)", [&] { return hinge_identities(base); });
  for (CheckResult& r : out) {
    if (r.detail.empty()) r.detail = fmt(r.metric);
  }
  return out;
}

}  // namespace tetherplan
