#include "tetherplan/cost_terms.hpp"

#include <cmath>

namespace tetherplan {
namespace {

// Adds the chain-rule contribution of a gradient with respect to the order-th
// derivative at one sample.
void accumulate(TermValue& term, const UniformPolyTrajectory& traj, const SamplePoint& s,
                int order, const Vec3& grad) {
  term.d_coefficients.middleRows<6>(6 * s.segment) +=
      polynomial_basis(s.local_time, order).transpose() * grad.transpose();
  term.d_segment_duration +=
      s.local_rate * grad.dot(traj.evaluate_segment(s.segment, s.local_time, order + 1));
}

// Cubic hinge on |x|^2 - bound^2 for the order-th derivative.
TermValue norm_hinge(const UniformPolyTrajectory& traj, const std::vector<SamplePoint>& samples,
                     int order, double bound) {
  TermValue term = TermValue::zero(traj);
  const double bound2 = bound * bound;
  for (const SamplePoint& s : samples) {
    const Vec3 x = traj.evaluate_segment(s.segment, s.local_time, order);
    const double v = x.squaredNorm() - bound2;
    if (v <= 0.0) continue;
    term.value += hinge_cube(v);
    accumulate(term, traj, s, order, hinge_cube_derivative(v) * 2.0 * x);
  }
  return term;
}

void require_kappa(int kappa) {
  if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 1");
}

}  // namespace

void Limits::validate() const {
  if (!(v_max > 0.0 && a_max > 0.0 && j_max > 0.0)) {
    throw Error(ErrorCode::ValidationError, "kinematic limits must be positive");
  }
  if (!(tau_min >= 0.0 && tau_max > tau_min)) {
    throw Error(ErrorCode::ValidationError, "thrust limits must satisfy 0 <= tau_min < tau_max");
  }
  if (kappa < 1) throw Error(ErrorCode::ValidationError, "kappa must be at least 1");
  if (!(obstacle_margin >= 0.0)) {
    throw Error(ErrorCode::ValidationError, "obstacle margin must be non-negative");
  }
  if (!(corridor_margin >= 0.0)) {
    throw Error(ErrorCode::ValidationError, "corridor margin must be non-negative");
  }
  if (!(rho >= 0.0)) throw Error(ErrorCode::ValidationError, "time weight must be non-negative");
}

void PenaltyWeights::validate() const {
  for (double w : {velocity, dynamics, thrust, cable, obstacle}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::ValidationError, "penalty weights must be finite and non-negative");
    }
  }
}

TermValue TermValue::zero(const UniformPolyTrajectory& traj) {
  TermValue t;
  t.d_coefficients = Eigen::MatrixXd::Zero(traj.coefficients().rows(), 3);
  return t;
}

void TermValue::add_scaled(const TermValue& other, double weight) {
  value += weight * other.value;
  d_coefficients += weight * other.d_coefficients;
  d_segment_duration += weight * other.d_segment_duration;
}

std::vector<double> sample_times(double t0, double tM, int kappa) {
  require_kappa(kappa);
  std::vector<double> t(static_cast<std::size_t>(kappa) + 1);
  for (int i = 0; i <= kappa; ++i) t[i] = (i == kappa) ? tM : t0 + (tM - t0) * i / kappa;
  return t;
}

std::vector<SamplePoint> sample_points(const UniformPolyTrajectory& traj, int kappa) {
  require_kappa(kappa);
  const int n = traj.segment_count();
  const double dt = traj.segment_duration();
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(kappa) + 1);
  for (int i = 0; i <= kappa; ++i) {
    // Sample time i T / kappa = (i N / kappa) dT, split into segment and fraction.
    const long q = static_cast<long>(i) * n;
    SamplePoint s;
    s.index = i;
    s.segment = static_cast<int>(q / kappa);
    double frac = static_cast<double>(q % kappa) / kappa;
    if (s.segment >= n) {
      s.segment = n - 1;
      frac = 1.0;
    }
    s.local_rate = frac;
    s.local_time = frac * dt;
    s.global_rate = static_cast<double>(q) / kappa;
    s.time = s.global_rate * dt;
    out.push_back(s);
  }
  return out;
}

TermValue smoothness_cost(const UniformPolyTrajectory& traj) {
  TermValue term = TermValue::zero(traj);
  const double T = traj.segment_duration();
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const Eigen::MatrixXd& c = traj.coefficients();
  for (int i = 0; i < traj.segment_count(); ++i) {
    const Eigen::RowVector3d c3 = c.row(6 * i + 3);
    const Eigen::RowVector3d c4 = c.row(6 * i + 4);
    const Eigen::RowVector3d c5 = c.row(6 * i + 5);
    term.value += 36.0 * c3.squaredNorm() * T + 144.0 * c3.dot(c4) * T2 +
                  240.0 * c3.dot(c5) * T3 + 192.0 * c4.squaredNorm() * T3 +
                  720.0 * c4.dot(c5) * T4 + 720.0 * c5.squaredNorm() * T5;
    term.d_coefficients.row(6 * i + 3) = 72.0 * c3 * T + 144.0 * c4 * T2 + 240.0 * c5 * T3;
    term.d_coefficients.row(6 * i + 4) = 144.0 * c3 * T2 + 384.0 * c4 * T3 + 720.0 * c5 * T4;
    term.d_coefficients.row(6 * i + 5) = 240.0 * c3 * T3 + 720.0 * c4 * T4 + 1440.0 * c5 * T5;
    term.d_segment_duration += traj.evaluate_segment(i, T, 3).squaredNorm();
  }
  return term;
}

TermValue duration_cost(const UniformPolyTrajectory& traj) {
  TermValue term = TermValue::zero(traj);
  term.value = traj.total_duration();
  term.d_segment_duration = traj.segment_count();
  return term;
}

FeasibilityTerms feasibility_penalty(const UniformPolyTrajectory& traj, const Limits& limits) {
  const auto samples = sample_points(traj, limits.kappa);
  FeasibilityTerms out;
  out.velocity = norm_hinge(traj, samples, 1, limits.v_max);
  out.acceleration = norm_hinge(traj, samples, 2, limits.a_max);
  out.jerk = norm_hinge(traj, samples, 3, limits.j_max);
  return out;
}

TermValue thrust_penalty(const UniformPolyTrajectory& traj, const Limits& limits,
                         const Vec3& gravity) {
  TermValue term = TermValue::zero(traj);
  const double lo2 = limits.tau_min * limits.tau_min;
  const double hi2 = limits.tau_max * limits.tau_max;
  for (const SamplePoint& s : sample_points(traj, limits.kappa)) {
    const Vec3 thrust = traj.evaluate_segment(s.segment, s.local_time, 2) - gravity;
    const double n2 = thrust.squaredNorm();
    const double below = lo2 - n2;
    const double above = n2 - hi2;
    if (below <= 0.0 && above <= 0.0) continue;
    term.value += hinge_cube(below) + hinge_cube(above);
    const double slope = hinge_cube_derivative(above) - hinge_cube_derivative(below);
    accumulate(term, traj, s, 2, slope * 2.0 * thrust);
  }
  return term;
}

TermValue obstacle_penalty(const UniformPolyTrajectory& traj,
                           std::span<const ObstaclePlane> obstacles, double margin, int kappa) {
  TermValue term = TermValue::zero(traj);
  if (obstacles.empty()) return term;
  for (const SamplePoint& s : sample_points(traj, kappa)) {
    const Vec3 p = traj.evaluate_segment(s.segment, s.local_time, 0);
    for (const ObstaclePlane& o : obstacles) {
      const double v = margin - o.signed_distance(p);
      if (v <= 0.0) continue;
      term.value += hinge_cube(v);
      accumulate(term, traj, s, 0, -hinge_cube_derivative(v) * o.normal);
    }
  }
  return term;
}

Vec3 max_length_gradient(const Vec3& p_droid, const Vec3& anchor, const CableProperties& props,
                         double step) {
  const Vec3 attach = attachment_point(p_droid, props);
  Vec3 grad = Vec3::Zero();
  for (int axis : {0, 2}) {
    Vec3 plus = attach;
    Vec3 minus = attach;
    plus(axis) += step;
    minus(axis) -= step;
    grad(axis) = (max_length(planar_configuration(plus, anchor), props) -
                  max_length(planar_configuration(minus, anchor), props)) /
                 (2.0 * step);
  }
  return grad;
}

TermValue cable_penalty(const UniformPolyTrajectory& traj, const Vec3& anchor,
                        const WinchSchedule& winch, const CableProperties& props, int kappa,
                        double margin) {
  TermValue term = TermValue::zero(traj);
  for (const SamplePoint& s : sample_points(traj, kappa)) {
    const Vec3 p = traj.evaluate_segment(s.segment, s.local_time, 0);
    const Vec3 attach = attachment_point(p, props);
    const double l_now = winch.length_at(s.time);
    const double rate = winch.rate_at(s.time);

    const Vec3 rel(attach.x() - anchor.x(), 0.0, attach.z() - anchor.z());
    const double l_min = rel.norm();
    const double lower = l_min + margin;
    const double upper = max_length(planar_configuration(attach, anchor), props) - margin;

    const double below = lower * lower - l_now * l_now;
    const double above = l_now * l_now - upper * upper;
    if (below <= 0.0 && above <= 0.0) continue;
    term.value += hinge_cube(below) + hinge_cube(above);

    Vec3 grad = Vec3::Zero();
    double d_time = 0.0;
    if (below > 0.0) {
      const double h = hinge_cube_derivative(below);
      // d(lower^2)/dp = 2 lower * rel / l_min
      grad += h * 2.0 * (l_min > 0.0 ? lower / l_min : 1.0) * rel;
      d_time -= h * 2.0 * l_now * rate;
    }
    if (above > 0.0) {
      const double h = hinge_cube_derivative(above);
      grad -= h * 2.0 * upper * max_length_gradient(p, anchor, props);
      d_time += h * 2.0 * l_now * rate;
    }
    accumulate(term, traj, s, 0, grad);
    term.d_segment_duration += d_time * s.global_rate;
  }
  return term;
}

}  // namespace tetherplan
