#include "tetherplan/dynamics.hpp"

#include "tetherplan/scenario.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace tetherplan {
namespace {

constexpr double kThrustEpsilon = 1e-9;  // N

Eigen::Matrix3d hat(const Vec3& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

struct ElasticCatenary {
  double length = 0.0;  // geometric length through both endpoints
  double horizontal = 0.0;
  double vertical_a = 0.0;  // vertical force on endpoint A
  double vertical_b = 0.0;  // vertical force on endpoint B
  double tension_a = 0.0;
  double tension_b = 0.0;
};

// Catenary of scale a through two points separated by span p and rise H.
// With u = p / 2a the vertical endpoint forces are mu/2 (H coth u -+ L),
// which stays accurate when the cable is nearly straight.
ElasticCatenary elastic_shape(double a, double p, double H, double mu) {
  const double u = 0.5 * p / a;
  ElasticCatenary c;
  c.length = std::hypot(H, 2.0 * a * std::sinh(u));
  const double h_coth = H / std::tanh(u);
  c.horizontal = mu * a;
  c.vertical_a = 0.5 * mu * (h_coth - c.length);
  c.vertical_b = -0.5 * mu * (h_coth + c.length);
  c.tension_a = std::hypot(c.horizontal, c.vertical_a);
  c.tension_b = std::hypot(c.horizontal, c.vertical_b);
  return c;
}

double critical_damping(const TetherModel& model, double mass) {
  return 2.0 * model.damping_ratio * std::sqrt(model.stiffness * mass);
}

Vec3 planar_unit(const Vec3& from, const Vec3& to) {
  Vec3 d(to.x() - from.x(), 0.0, to.z() - from.z());
  const double n = d.norm();
  return n > 0.0 ? Vec3(d / n) : Vec3::UnitZ();
}

double swing_angle(const Vec3& attach, const Vec3& anchor) {
  return std::atan2(std::abs(anchor.x() - attach.x()), anchor.z() - attach.z());
}

void fill_record(TelemetryRecord& r, const SystemState& st, const Scenario& sc,
                 const TetherForce& tf) {
  const Vec3 attach = attachment_point(st.end_droid.position, sc.cable);
  r.time = st.time;
  r.position = st.end_droid.position;
  r.velocity = st.end_droid.velocity;
  r.l_now = st.winch.released_length;
  r.l_min = min_length(attach, sc.anchor);
  r.l_max = max_length(planar_configuration(attach, sc.anchor), sc.cable);
  r.tension_end_droid = tf.tension_end_droid;
  r.tension_payload_drone = tf.tension_payload_drone;
  r.swing_angle = swing_angle(attach, sc.anchor);
}

void account(TelemetryLog& log, TelemetryRecord& r, double tolerance) {
  const CableBounds b{r.l_min, r.l_max, r.l_now};
  const double v = b.squared_violation();
  log.max_corridor_violation = std::max(log.max_corridor_violation, v);
  r.corridor_violation = v > tolerance;
  if (r.corridor_violation) ++log.corridor_violations;
  log.peak_tension = std::max({log.peak_tension, r.tension_end_droid, r.tension_payload_drone});
  log.max_tracking_error = std::max(log.max_tracking_error, (r.position - r.reference).norm());
}

SystemParams system_params(const Scenario& sc) {
  SystemParams sp;
  sp.payload_drone = sc.payload_drone;
  sp.end_droid = sc.end_droid;
  sp.cable = sc.cable;
  sp.tether = sc.simulation.tether;
  sp.payload_drone_fixed = true;
  sp.stow_length = sc.winch.stow_length;
  return sp;
}

}  // namespace

void DroneParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::ValidationError, "drone mass must be positive");
  }
  if (!gravity.allFinite()) throw Error(ErrorCode::ValidationError, "gravity must be finite");
}

Eigen::Matrix3d so3_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-12) return Eigen::Matrix3d::Identity() + hat(w);
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Vec3 so3_log(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

FlatState FlatState::from_trajectory(const UniformPolyTrajectory& traj, double t, double yaw) {
  FlatState f;
  f.position = traj.evaluate(t, 0);
  f.velocity = traj.evaluate(t, 1);
  f.acceleration = traj.evaluate(t, 2);
  f.jerk = traj.evaluate(t, 3);
  f.yaw = yaw;
  return f;
}

ControlInputs flat_to_inputs(const FlatState& flat, const DroneParams& params,
                             const Vec3& tether_on_droid, const Vec3& tether_rate) {
  ControlInputs in;
  in.thrust_vector = params.mass * (flat.acceleration - params.gravity) - tether_on_droid;
  in.thrust = in.thrust_vector.norm();
  if (!(in.thrust > kThrustEpsilon)) {
    throw Error(ErrorCode::DegenerateThrust, "required thrust vanishes (free fall)");
  }
  const Vec3 zb = in.thrust_vector / in.thrust;
  const Vec3 xc(std::cos(flat.yaw), std::sin(flat.yaw), 0.0);
  Vec3 yb = zb.cross(xc);
  if (yb.norm() < 1e-9) {
    throw Error(ErrorCode::DegenerateThrust, "thrust direction parallel to the heading");
  }
  yb.normalize();
  const Vec3 xb = yb.cross(zb);
  in.attitude.col(0) = xb;
  in.attitude.col(1) = yb;
  in.attitude.col(2) = zb;

  // dz_b/dt = R (omega x e3) = omega_y x_b - omega_x y_b.
  const Vec3 f_dot = params.mass * flat.jerk - tether_rate;
  const Vec3 zb_dot = (f_dot - zb.dot(f_dot) * zb) / in.thrust;
  in.angular_velocity = Vec3(-zb_dot.dot(yb), zb_dot.dot(xb), flat.yaw_rate * zb.z());
  return in;
}

TetherForce tether_force(const Vec3& droid_pos, const Vec3& anchor_pos, const WinchState& winch,
                         const CableProperties& props, const TetherModel& model, double droid_mass,
                         double stretch_rate) {
  props.validate();
  if (!(model.stiffness > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tether stiffness must be positive");
  }
  const Vec3 attach = attachment_point(droid_pos, props);
  const double mu = props.weight_per_length();
  const double released = std::max(winch.released_length, 0.0);
  const double k = model.stiffness;
  const double dx = anchor_pos.x() - attach.x();
  const double p = std::abs(dx);
  const double H = anchor_pos.z() - attach.z();
  const double chord = std::hypot(p, H);
  const double damping = critical_damping(model, droid_mass) * stretch_rate;

  TetherForce out;
  out.stretched = released < chord;

  if (p < kDegenerateSpan) {
    // Vertical cable: stiff spring when stretched, two hanging strands otherwise.
    const double mean = std::max(0.0, k * (chord - released) + (out.stretched ? damping : 0.0));
    const double lower = mean - 0.5 * mu * released;
    const double upper = mean + 0.5 * mu * released;
    const bool droid_low = H >= 0.0;
    Vec3 f_low, f_up;
    if (lower >= 0.0) {
      f_low = Vec3(0.0, 0.0, lower);
      f_up = Vec3(0.0, 0.0, -upper);
      out.state = CableState::Taut;
      out.geometric_length = chord;
    } else {
      const double l_low = std::max(0.0, 0.5 * (released - chord));
      const double l_up = std::max(0.0, 0.5 * (released + chord));
      f_low = Vec3(0.0, 0.0, -mu * l_low);
      f_up = Vec3(0.0, 0.0, -mu * l_up);
      out.state = CableState::Slack;
      out.geometric_length = released;
    }
    out.on_end_droid = droid_low ? f_low : f_up;
    out.on_payload_drone = droid_low ? f_up : f_low;
    out.tension_end_droid = out.on_end_droid.norm();
    out.tension_payload_drone = out.on_payload_drone.norm();
    return out;
  }

  // Scale a where the curve length equals the released length plus stretch;
  // the residual decreases monotonically in a.
  auto residual = [&](double a) {
    const ElasticCatenary c = elastic_shape(a, p, H, mu);
    return c.length - released - 0.5 * (c.tension_a + c.tension_b) / k;
  };
  const double lo = p / 1400.0;
  double hi = std::max(1.0, p);
  while (residual(hi) >= 0.0) {
    hi *= 16.0;
    if (hi > 1e18) throw Error(ErrorCode::NoConvergence, "elastic catenary not bracketed");
  }
  double a = 0.0;
  if (!bisect_positive(residual, lo, hi, a)) {
    throw Error(ErrorCode::NoConvergence, "elastic catenary bisection budget exhausted");
  }
  const ElasticCatenary c = elastic_shape(a, p, H, mu);
  const double sx = dx >= 0.0 ? 1.0 : -1.0;
  out.on_end_droid = Vec3(sx * c.horizontal, 0.0, c.vertical_a);
  out.on_payload_drone = Vec3(-sx * c.horizontal, 0.0, c.vertical_b);
  out.geometric_length = c.length;
  out.state = (c.vertical_a < 0.0 && c.vertical_b < 0.0) ? CableState::Slack : CableState::Taut;

  if (out.stretched && damping != 0.0) {
    const Vec3 e = planar_unit(attach, anchor_pos);
    const double along = out.on_end_droid.dot(e);
    const double d = std::max(damping, -along);
    out.on_end_droid += d * e;
    out.on_payload_drone -= d * e;
  }
  out.tension_end_droid = out.on_end_droid.norm();
  out.tension_payload_drone = out.on_payload_drone.norm();
  return out;
}

TetherForce current_tether_force(const SystemState& state, const SystemParams& params) {
  if (!params.tether_enabled) return {};
  const Vec3 attach = attachment_point(state.end_droid.position, params.cable);
  const Vec3 e = planar_unit(attach, state.payload_drone.position);
  const double chord_rate = e.dot(state.payload_drone.velocity - state.end_droid.velocity);
  return tether_force(state.end_droid.position, state.payload_drone.position, state.winch,
                      params.cable, params.tether, params.end_droid.mass,
                      chord_rate - state.winch.payout_speed);
}

TetherForce step(SystemState& state, const SystemParams& params, const BodyInputs& payload_in,
                 const BodyInputs& end_in, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");

  // Attitudes first so the thrust acts along the freshly commanded axis.
  state.end_droid.attitude = state.end_droid.attitude * so3_exp(end_in.angular_velocity * dt);
  state.end_droid.angular_velocity = end_in.angular_velocity;
  if (!params.payload_drone_fixed) {
    state.payload_drone.attitude =
        state.payload_drone.attitude * so3_exp(payload_in.angular_velocity * dt);
    state.payload_drone.angular_velocity = payload_in.angular_velocity;
  }

  const TetherForce tf = current_tether_force(state, params);

  auto advance = [dt](RigidBodyState& body, const DroneParams& dp, double thrust,
                      const Vec3& external) {
    const Vec3 acc =
        thrust * body.attitude.col(2) / dp.mass + dp.gravity + external / dp.mass;
    body.velocity += acc * dt;
    body.position += body.velocity * dt;
  };
  advance(state.end_droid, params.end_droid, end_in.thrust, tf.on_end_droid);
  if (!params.payload_drone_fixed) {
    advance(state.payload_drone, params.payload_drone, payload_in.thrust, tf.on_payload_drone);
  }

  state.winch.released_length = std::max(
      {state.winch.released_length + state.winch.payout_speed * dt, params.stow_length, 0.0});
  state.time += dt;
  return tf;
}

TelemetryLog simulate_pickup(const Scenario& scenario, const UniformPolyTrajectory& planned) {
  const SimulationConfig& cfg = scenario.simulation;
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const SystemParams sp = system_params(scenario);
  const double horizon = planned.total_duration();
  const double t_end = horizon + cfg.hold_time;
  const long steps = static_cast<long>(std::ceil(t_end / cfg.dt - 1e-9));

  SystemState st;
  st.payload_drone.position = scenario.anchor;
  st.end_droid.position = planned.evaluate(0.0, 0);
  st.end_droid.velocity = planned.evaluate(0.0, 1);
  st.winch.released_length = scenario.winch.length_at(0.0);
  st.winch.payout_speed = scenario.winch.rate_at(0.0);

  const Vec3 p_end = planned.evaluate(horizon, 0);
  const Vec3 v_end = planned.evaluate(horizon, 1);
  auto reference = [&](double t) {
    if (t <= horizon) return FlatState::from_trajectory(planned, t, scenario.start_yaw);
    FlatState f;
    f.position = p_end + v_end * (t - horizon);
    f.velocity = v_end;
    f.yaw = scenario.start_yaw;
    return f;
  };

  {
    const TetherForce tf = current_tether_force(st, sp);
    st.end_droid.attitude =
        flat_to_inputs(reference(0.0), sp.end_droid, tf.on_end_droid).attitude;
  }

  TelemetryLog log;
  log.records.reserve(static_cast<std::size_t>(steps) + 1);
  Vec3 last_acc = planned.evaluate(0.0, 2);
  double last_thrust = 0.0;
  for (long k = 0;; ++k) {
    const FlatState ref = reference(st.time);
    const TetherForce tf = current_tether_force(st, sp);

    const Vec3 a_cmd = ref.acceleration + cfg.kp * (ref.position - st.end_droid.position) +
                       cfg.kd * (ref.velocity - st.end_droid.velocity);
    FlatState cmd = ref;
    cmd.acceleration = a_cmd;
    const ControlInputs in = flat_to_inputs(cmd, sp.end_droid, tf.on_end_droid);
    if (k == 0) last_thrust = in.thrust;

    TelemetryRecord r;
    fill_record(r, st, scenario, tf);
    r.reference = ref.position;
    r.acceleration = last_acc;
    r.thrust = last_thrust;
    account(log, r, cfg.corridor_tolerance);
    log.records.push_back(r);
    if (k >= steps) break;

    // Ideal attitude loop: body rates that reach the desired attitude in one step.
    const Vec3 omega = so3_log(st.end_droid.attitude.transpose() * in.attitude) / cfg.dt;
    const Vec3 v_before = st.end_droid.velocity;
    step(st, sp, BodyInputs{}, BodyInputs{in.thrust, omega}, cfg.dt);
    // The winch stops when the plan ends and holds through the hover.
    const bool paying_out = st.time < horizon;
    st.winch.released_length = scenario.winch.length_at(std::min(st.time, horizon));
    st.winch.payout_speed = paying_out ? scenario.winch.rate_at(st.time) : 0.0;
    last_acc = (st.end_droid.velocity - v_before) / cfg.dt;
    last_thrust = in.thrust;
  }
  log.duration = st.time;
  log.completed = true;
  return log;
}

TelemetryLog simulate_retrieval(const Scenario& scenario, double attach_mass) {
  return simulate_retrieval(scenario, attach_mass, scenario.goal_position);
}

TelemetryLog simulate_retrieval(const Scenario& scenario, double attach_mass, const Vec3& start,
                                const Vec3& start_velocity) {
  const SimulationConfig& cfg = scenario.simulation;
  if (!(attach_mass >= 0.0)) throw Error(ErrorCode::InvalidArgument, "attach mass must be >= 0");
  if (!(cfg.retrieval_speed > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "retrieval speed must be positive");
  }
  SystemParams sp = system_params(scenario);
  sp.end_droid.mass += attach_mass;
  const double g = -sp.end_droid.gravity.z();

  // Start in quasi-static stretch, already moving with the reel.
  const Vec3 attach = attachment_point(start, scenario.cable);
  const double chord = min_length(attach, scenario.anchor);
  const double mu = scenario.cable.weight_per_length();
  const double mean_tension = sp.end_droid.mass * g + 0.5 * mu * chord;

  SystemState st;
  st.payload_drone.position = scenario.anchor;
  st.end_droid.position = start;
  st.end_droid.velocity = start_velocity + cfg.retrieval_speed * planar_unit(attach, scenario.anchor);
  st.winch.released_length = std::max(chord - mean_tension / sp.tether.stiffness, 0.0);
  st.winch.payout_speed = -cfg.retrieval_speed;
  if (st.winch.released_length <= sp.stow_length) {
    throw Error(ErrorCode::InvalidArgument, "droid already within the stow length");
  }

  TelemetryLog log;
  const long max_steps = static_cast<long>(std::ceil(cfg.max_retrieval_time / cfg.dt));
  Vec3 last_acc = Vec3::Zero();
  for (long k = 0;; ++k) {
    const TetherForce tf = current_tether_force(st, sp);
    TelemetryRecord r;
    fill_record(r, st, scenario, tf);
    r.reference = r.position;
    r.acceleration = last_acc;
    log.peak_tension = std::max({log.peak_tension, r.tension_end_droid, r.tension_payload_drone});
    log.records.push_back(r);
    if (st.winch.released_length <= sp.stow_length + 1e-12) {
      log.completed = true;
      break;
    }
    if (k >= max_steps) break;
    const Vec3 v_before = st.end_droid.velocity;
    step(st, sp, BodyInputs{}, BodyInputs{}, cfg.dt);
    last_acc = (st.end_droid.velocity - v_before) / cfg.dt;
  }
  log.duration = st.time;
  return log;
}

}  // namespace tetherplan
