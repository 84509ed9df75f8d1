#pragma once

// Terms of the penalised planning objective. Every term returns its value
// together with the gradient with respect to the trajectory coefficients and
// the segment duration; trajectory::propagate_gradients maps those onto the
// decision variables.

#include "tetherplan/cable_model.hpp"
#include "tetherplan/trajectory.hpp"

#include <span>
#include <vector>

namespace tetherplan {

struct Limits {
  double v_max = 2.0;      // m/s
  double a_max = 6.0;      // m/s^2
  double j_max = 30.0;     // m/s^3
  double tau_min = 2.0;    // m/s^2, net thrust acceleration
  double tau_max = 20.0;   // m/s^2
  int kappa = 32;          // samples per trajectory (kappa + 1 points)
  double obstacle_margin = 0.3;  // m
  double corridor_margin = 0.01; // m, planner tightens [L_min, L_max] by this on both sides
  double rho = 20.0;       // time weight

  void validate() const;
};

struct PenaltyWeights {
  double velocity = 1e4;      // w_v
  double dynamics = 1e4;      // w_d, acceleration and jerk hinges
  double thrust = 1e4;        // w_tau
  double cable = 1e5;         // w_L
  double obstacle = 1e5;      // w_o

  void validate() const;
};

/// Half-space boundary (x - point) . normal = 0, normal pointing to free space.
struct ObstaclePlane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();

  double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
};

struct TermValue {
  double value = 0.0;
  Eigen::MatrixXd d_coefficients;  // 6N x 3
  double d_segment_duration = 0.0;

  static TermValue zero(const UniformPolyTrajectory& traj);
  void add_scaled(const TermValue& other, double weight);
};

struct FeasibilityTerms {
  TermValue velocity;
  TermValue acceleration;
  TermValue jerk;

  double total() const { return velocity.value + acceleration.value + jerk.value; }
};

/// Sample i of kappa: segment index, local time and the derivatives of the
/// sample time with respect to the segment duration.
struct SamplePoint {
  int index = 0;
  int segment = 0;
  double local_time = 0.0;
  double time = 0.0;
  double local_rate = 0.0;   // d(local_time) / d(dT)
  double global_rate = 0.0;  // d(time) / d(dT)
};

/// kappa + 1 equally spaced times from t0 to tM inclusive.
std::vector<double> sample_times(double t0, double tM, int kappa);

std::vector<SamplePoint> sample_points(const UniformPolyTrajectory& traj, int kappa);

/// Exact integral of |p'''|^2 over the whole trajectory.
TermValue smoothness_cost(const UniformPolyTrajectory& traj);

/// Time term T with its gradient.
TermValue duration_cost(const UniformPolyTrajectory& traj);

/// Cubic hinges on |v|^2 - v_max^2, |a|^2 - a_max^2 and |j|^2 - j_max^2.
FeasibilityTerms feasibility_penalty(const UniformPolyTrajectory& traj, const Limits& limits);

/// Two-sided cubic hinge on |p'' - g|^2 against [tau_min^2, tau_max^2].
TermValue thrust_penalty(const UniformPolyTrajectory& traj, const Limits& limits,
                         const Vec3& gravity);

TermValue obstacle_penalty(const UniformPolyTrajectory& traj,
                           std::span<const ObstaclePlane> obstacles, double margin, int kappa);

/// Cubic hinges keeping the winch length inside [L_min + margin, L_max - margin]
/// at every sample. The anchor (payload drone) hovers at a fixed point.
TermValue cable_penalty(const UniformPolyTrajectory& traj, const Vec3& anchor,
                        const WinchSchedule& winch, const CableProperties& props, int kappa,
                        double margin = 0.0);

/// Central-difference gradient of max_length with respect to the end-droid
/// position (x and z; y does not enter the planar model).
Vec3 max_length_gradient(const Vec3& p_droid, const Vec3& anchor, const CableProperties& props,
                         double step = 1e-6);

}  // namespace tetherplan
