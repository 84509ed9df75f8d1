#pragma once

// Point-mass simulation of the payload drone, the tether and the end droid.
//
// The tether is an elastic catenary: the released length stretches by
// (mean endpoint tension) / stiffness. A slack cable hangs as an ordinary
// catenary with negligible stretch, a cable pulled below its chord behaves as
// a stiff spring, and the force is continuous between the two regimes.

#include "tetherplan/cable_model.hpp"
#include "tetherplan/trajectory.hpp"

#include <Eigen/Core>

#include <vector>

namespace tetherplan {

struct Scenario;

struct DroneParams {
  double mass = 0.5;                   // kg
  Vec3 gravity = gravity_vector();     // m/s^2

  void validate() const;
};

struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Eigen::Matrix3d attitude = Eigen::Matrix3d::Identity();  // body to world
  Vec3 angular_velocity = Vec3::Zero();                     // body frame
};

struct WinchState {
  double released_length = 1.0;  // m
  double payout_speed = 0.0;     // m/s, negative while reeling in
};

struct TetherModel {
  double stiffness = 5e3;      // N/m, whole-cable axial stiffness
  double damping_ratio = 1.0;  // of the stretch mode, relative to the end-droid mass
};

struct TetherForce {
  Vec3 on_end_droid = Vec3::Zero();
  Vec3 on_payload_drone = Vec3::Zero();
  double tension_end_droid = 0.0;      // N, at the droid attachment
  double tension_payload_drone = 0.0;  // N, at the anchor
  double geometric_length = 0.0;       // m, stretched curve length
  CableState state = CableState::Taut;
  bool stretched = false;              // released length below the chord
};

/// Full flat-output state at one instant.
struct FlatState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;

  static FlatState from_trajectory(const UniformPolyTrajectory& traj, double t, double yaw = 0.0);
};

struct ControlInputs {
  double thrust = 0.0;                                      // N, along body z
  Eigen::Matrix3d attitude = Eigen::Matrix3d::Identity();
  Vec3 angular_velocity = Vec3::Zero();                     // body frame
  Vec3 thrust_vector = Vec3::Zero();                        // N, world frame
};

/// Thrust, attitude and body rates that realise the flat state while the
/// tether pulls on the droid with `tether_on_droid` (changing at
/// `tether_rate`). Throws DegenerateThrust near free fall.
ControlInputs flat_to_inputs(const FlatState& flat, const DroneParams& params,
                             const Vec3& tether_on_droid, const Vec3& tether_rate = Vec3::Zero());

/// Forces at both ends of the tether. `stretch_rate` is d(chord)/dt minus
/// the payout speed; it only feeds the damping of a stretched cable.
TetherForce tether_force(const Vec3& droid_pos, const Vec3& anchor_pos, const WinchState& winch,
                         const CableProperties& props, const TetherModel& model = {},
                         double droid_mass = 0.5, double stretch_rate = 0.0);

struct BodyInputs {
  double thrust = 0.0;                   // N along body z
  Vec3 angular_velocity = Vec3::Zero();  // body frame
};

struct SystemState {
  RigidBodyState payload_drone;
  RigidBodyState end_droid;
  WinchState winch;
  double time = 0.0;
};

struct SystemParams {
  DroneParams payload_drone{1.5, gravity_vector()};
  DroneParams end_droid;
  CableProperties cable;
  TetherModel tether;
  bool tether_enabled = true;
  bool payload_drone_fixed = true;  // hovering anchor
  double stow_length = 0.0;         // winch never reels in below this
};

/// One semi-implicit Euler step: attitudes advance on SO(3) with the commanded
/// body rates, then velocities from the forces at the updated attitude, then
/// positions and the winch. Returns the tether force that was applied.
TetherForce step(SystemState& state, const SystemParams& params, const BodyInputs& payload_in,
                 const BodyInputs& end_in, double dt);

/// Tether force for the current state, including damping.
TetherForce current_tether_force(const SystemState& state, const SystemParams& params);

struct SimulationConfig {
  double dt = 1e-3;
  double kp = 16.0;
  double kd = 8.0;
  double hold_time = 0.5;               // s simulated after the plan ends
  double corridor_tolerance = 1e-3;     // m^2
  double retrieval_speed = 0.2;         // m/s reel-in speed
  double max_retrieval_time = 600.0;    // s
  TetherModel tether;
};

struct TelemetryRecord {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 reference = Vec3::Zero();
  double l_min = 0.0;
  double l_max = 0.0;
  double l_now = 0.0;
  double tension_end_droid = 0.0;
  double tension_payload_drone = 0.0;
  double thrust = 0.0;
  double swing_angle = 0.0;  // rad, cable chord from the downward vertical
  bool corridor_violation = false;
};

struct TelemetryLog {
  std::vector<TelemetryRecord> records;
  int corridor_violations = 0;  // samples beyond the tolerance
  double max_corridor_violation = 0.0;
  double max_tracking_error = 0.0;
  double peak_tension = 0.0;
  double duration = 0.0;
  bool completed = false;
};

/// End droid tracking `planned` with PD plus feedforward while the payload
/// drone hovers at the scenario anchor and the winch follows its schedule.
TelemetryLog simulate_pickup(const Scenario& scenario, const UniformPolyTrajectory& planned);

/// Passive retrieval: zero thrust, winch reeling in at the configured speed
/// until the stow length. The droid starts at `start` (default: the goal)
/// carrying `attach_mass` extra kilograms, on a cable in quasi-static stretch.
TelemetryLog simulate_retrieval(const Scenario& scenario, double attach_mass);
TelemetryLog simulate_retrieval(const Scenario& scenario, double attach_mass, const Vec3& start,
                                const Vec3& start_velocity = Vec3::Zero());

/// Rotation by the exponential map of a rotation vector.
Eigen::Matrix3d so3_exp(const Vec3& rotation_vector);
/// Inverse of so3_exp for rotations away from pi.
Vec3 so3_log(const Eigen::Matrix3d& rotation);

}  // namespace tetherplan
