#pragma once

// Uniform-duration minimum-jerk piecewise polynomial trajectories.
//
// N quintic segments of equal duration dT. The start position, velocity and
// acceleration, the terminal position and velocity and the N - 1 intermediate
// waypoints are imposed; the joints are C^4 and the free terminal
// acceleration obeys the natural condition p'''(T) = 0. Those are exactly the
// optimality conditions of min integral |p'''|^2, so the coefficient map
// c = M(q, T) is linear in q and needs one banded solve.

#include "tetherplan/banded_system.hpp"
#include "tetherplan/common.hpp"

#include <Eigen/Core>

namespace tetherplan {

struct BoundaryState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct FlatOutput {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;

  static FlatOutput make(const Vec3& position, double yaw) { return {position, wrap_angle(yaw)}; }
};

class UniformPolyTrajectory {
 public:
  static constexpr int kMinimizedOrder = 3;
  static constexpr int kCoefficients = 2 * kMinimizedOrder;
  static constexpr int kMaxOrder = kCoefficients - 1;

  struct Gradient {
    Eigen::Matrix3Xd waypoints;  // dJ/dq, one column per waypoint
    double total_duration = 0.0;  // dJ/dT
  };

  UniformPolyTrajectory() = default;

  /// `waypoints` holds the N - 1 intermediate points as columns.
  static UniformPolyTrajectory construct(const Eigen::Matrix3Xd& waypoints, double total_duration,
                                         const BoundaryState& start, const Vec3& goal_position,
                                         const Vec3& goal_velocity);

  /// Rebuilds a trajectory from stored coefficients (6N x 3, row 6i + k holds
  /// the t^k coefficient of segment i). Such a trajectory cannot propagate
  /// gradients.
  static UniformPolyTrajectory from_coefficients(const Eigen::MatrixXd& coefficients,
                                                 double segment_duration);

  int segment_count() const { return segments_; }
  double segment_duration() const { return segment_duration_; }
  double total_duration() const { return segments_ * segment_duration_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  bool has_gradient_map() const { return system_.factorized(); }

  /// order-th derivative at global time t in [0, T].
  Vec3 evaluate(double t, int order = 0) const;
  /// order-th derivative of one segment at local time t in [0, dT].
  Vec3 evaluate_segment(int segment, double local_t, int order) const;

  /// Chain rule through c = M(q, T): takes dJ/dc (6N x 3) and the explicit
  /// dJ/d(dT) and returns dJ/dq and dJ/dT.
  Gradient propagate_gradients(const Eigen::MatrixXd& dJ_dc, double dJ_dsegment_duration) const;

 private:
  int segments_ = 0;
  double segment_duration_ = 0.0;
  Eigen::MatrixXd coefficients_;
  BandedSystem system_;
};

/// Row of d^order/dt^order [1, t, ..., t^5].
Eigen::Matrix<double, 1, 6> polynomial_basis(double t, int order);

}  // namespace tetherplan
