#include "tetherplan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tetherplan {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                         const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": field '" << field << "': " << what;
    throw Error(ErrorCode::ParseError, os.str());
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (node.IsDefined() && !node.IsNull() && !node.IsMap()) fail(node, path, "expected a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& path,
                  std::initializer_list<const char*> allowed) const {
    if (!node.IsDefined() || node.IsNull()) return;
    require_map(node, path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(kv.first, join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  void number(const YAML::Node& parent, const char* key, const std::string& path,
              double& out) const {
    if (!parent.IsDefined() || parent.IsNull()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return;
    try {
      out = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, join(path, key), "expected a number");
    }
    if (!std::isfinite(out)) fail(n, join(path, key), "must be finite");
  }

  void integer(const YAML::Node& parent, const char* key, const std::string& path,
               int& out) const {
    if (!parent.IsDefined() || parent.IsNull()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return;
    try {
      out = n.as<int>();
    } catch (const YAML::Exception&) {
      fail(n, join(path, key), "expected an integer");
    }
  }

  void boolean(const YAML::Node& parent, const char* key, const std::string& path,
               bool& out) const {
    if (!parent.IsDefined() || parent.IsNull()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return;
    try {
      out = n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, join(path, key), "expected true or false");
    }
  }

  void text(const YAML::Node& parent, const char* key, const std::string& path,
            std::string& out) const {
    if (!parent.IsDefined() || parent.IsNull()) return;
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return;
    if (!n.IsScalar()) fail(n, join(path, key), "expected a string");
    out = n.as<std::string>();
  }

  bool vector(const YAML::Node& parent, const char* key, const std::string& path,
              Vec3& out) const {
    if (!parent.IsDefined() || parent.IsNull()) return false;
    const YAML::Node n = parent[key];
    if (!n.IsDefined()) return false;
    if (!n.IsSequence() || n.size() != 3) fail(n, join(path, key), "expected [x, y, z]");
    for (std::size_t i = 0; i < 3; ++i) {
      try {
        out(static_cast<Eigen::Index>(i)) = n[i].as<double>();
      } catch (const YAML::Exception&) {
        fail(n[i], join(path, key), "expected a number");
      }
      if (!std::isfinite(out(static_cast<Eigen::Index>(i)))) {
        fail(n[i], join(path, key), "must be finite");
      }
    }
    return true;
  }

 private:
  std::string source_;
};

void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

}  // namespace

void PlannerSettings::validate() const {
  if (!(min_duration > 0.0)) invalid("planner.min_duration_s must be positive");
  if (fixed_duration && !(*fixed_duration > 0.0)) {
    invalid("planner.fixed_duration_s must be positive");
  }
  if (max_iterations < 0) invalid("planner.max_iterations must be non-negative");
  if (memory < 1) invalid("planner.memory must be at least 1");
  if (!(gradient_tolerance > 0.0)) invalid("planner.gradient_tolerance must be positive");
  if (!(penalty_tolerance >= 0.0)) invalid("planner.penalty_tolerance must be non-negative");
  if (dense_check_factor < 1) invalid("planner.dense_check_factor must be at least 1");
  if (!(corridor_tolerance > 0.0)) invalid("planner.corridor_tolerance_m2 must be positive");
}

void Scenario::validate() const {
  if (segments < 1 || segments > 256) invalid("scenario.segments must lie in [1, 256]");
  try {
    cable.validate();
    winch.validate();
    end_droid.validate();
    payload_drone.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError) throw;
    invalid(e.what());
  }
  limits.validate();
  if (limits.kappa < 2) invalid("limits.kappa must be at least 2");
  weights.validate();
  planner.validate();
  for (const ObstaclePlane& o : obstacles) {
    if (std::abs(o.normal.norm() - 1.0) > 1e-6) invalid("obstacle normals must be unit vectors");
  }
  if (!(attach_mass >= 0.0)) invalid("vehicles.attach_mass_kg must be non-negative");
  if (!(simulation.dt > 0.0 && simulation.dt <= 0.05)) {
    invalid("simulation.dt_s must lie in (0, 0.05]");
  }
  if (!(simulation.tether.stiffness > 0.0)) invalid("simulation.tether_stiffness_npm must be > 0");
  if (!(simulation.tether.damping_ratio >= 0.0)) {
    invalid("simulation.damping_ratio must be non-negative");
  }
  if (!(simulation.retrieval_speed > 0.0)) invalid("winch.retrieval_speed_mps must be positive");
  if (!(simulation.hold_time >= 0.0)) invalid("simulation.hold_time_s must be non-negative");
}

Scenario parse_scenario(const std::string& yaml_text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ": malformed YAML: " << e.msg;
    throw Error(ErrorCode::ParseError, os.str());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  rd.check_keys(root, "",
                {"scenario", "cable", "winch", "limits", "weights", "planner", "vehicles",
                 "simulation"});

  Scenario sc;

  const YAML::Node s = root["scenario"];
  rd.check_keys(s, "scenario",
                {"name", "segments", "start", "goal", "anchor_position_m", "gravity_mps2",
                 "obstacles"});
  rd.text(s, "name", "scenario", sc.name);
  rd.integer(s, "segments", "scenario", sc.segments);
  double g = kStandardGravity;
  rd.number(s, "gravity_mps2", "scenario", g);

  const YAML::Node start = s.IsDefined() && !s.IsNull() ? s["start"] : YAML::Node();
  rd.check_keys(start, "scenario.start",
                {"position_m", "velocity_mps", "acceleration_mps2", "yaw_rad"});
  rd.vector(start, "position_m", "scenario.start", sc.start.position);
  rd.vector(start, "velocity_mps", "scenario.start", sc.start.velocity);
  rd.vector(start, "acceleration_mps2", "scenario.start", sc.start.acceleration);
  rd.number(start, "yaw_rad", "scenario.start", sc.start_yaw);

  const YAML::Node goal = s.IsDefined() && !s.IsNull() ? s["goal"] : YAML::Node();
  rd.check_keys(goal, "scenario.goal", {"position_m", "velocity_mps"});
  rd.vector(goal, "position_m", "scenario.goal", sc.goal_position);
  rd.vector(goal, "velocity_mps", "scenario.goal", sc.goal_velocity);

  sc.anchor = sc.start.position + Vec3(0.0, 0.0, 3.0);
  rd.vector(s, "anchor_position_m", "scenario", sc.anchor);

  if (s.IsDefined() && !s.IsNull() && s["obstacles"].IsDefined()) {
    const YAML::Node obs = s["obstacles"];
    if (!obs.IsSequence()) rd.fail(obs, "scenario.obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string path = "scenario.obstacles[" + std::to_string(i) + "]";
      rd.check_keys(obs[i], path, {"point_m", "normal"});
      ObstaclePlane o;
      if (!rd.vector(obs[i], "point_m", path, o.point)) rd.fail(obs[i], path, "missing point_m");
      if (!rd.vector(obs[i], "normal", path, o.normal)) rd.fail(obs[i], path, "missing normal");
      sc.obstacles.push_back(o);
    }
  }

  const YAML::Node cable = root["cable"];
  rd.check_keys(cable, "cable",
                {"unit_mass_gpm", "unit_mass_kgpm", "sag_limit_m", "attachment_offset_m",
                 "constraint"});
  if (cable.IsDefined() && !cable.IsNull() && cable["unit_mass_gpm"].IsDefined() &&
      cable["unit_mass_kgpm"].IsDefined()) {
    rd.fail(cable["unit_mass_kgpm"], "cable.unit_mass_kgpm",
            "give the cable mass either in g/m or in kg/m, not both");
  }
  double grams_per_metre = std::nan("");
  rd.number(cable, "unit_mass_gpm", "cable", grams_per_metre);
  if (!std::isnan(grams_per_metre)) sc.cable.mass_per_length = grams_per_metre * 1e-3;
  rd.number(cable, "unit_mass_kgpm", "cable", sc.cable.mass_per_length);
  rd.number(cable, "sag_limit_m", "cable", sc.cable.sag_limit);
  rd.number(cable, "attachment_offset_m", "cable", sc.cable.attachment_offset);
  rd.boolean(cable, "constraint", "cable", sc.cable_constraint);
  sc.cable.gravity = g;

  const YAML::Node winch = root["winch"];
  rd.check_keys(winch, "winch",
                {"payout_speed_mps", "initial_length_m", "capacity_m", "stow_length_m",
                 "retrieval_speed_mps"});
  rd.number(winch, "payout_speed_mps", "winch", sc.winch.payout_speed);
  rd.number(winch, "capacity_m", "winch", sc.winch.capacity);
  rd.number(winch, "stow_length_m", "winch", sc.winch.stow_length);
  rd.number(winch, "retrieval_speed_mps", "winch", sc.simulation.retrieval_speed);
  double initial = std::nan("");
  rd.number(winch, "initial_length_m", "winch", initial);

  const YAML::Node lim = root["limits"];
  rd.check_keys(lim, "limits",
                {"v_max_mps", "a_max_mps2", "j_max_mps3", "tau_min_mps2", "tau_max_mps2", "kappa",
                 "obstacle_margin_m", "corridor_margin_m", "rho"});
  rd.number(lim, "v_max_mps", "limits", sc.limits.v_max);
  rd.number(lim, "a_max_mps2", "limits", sc.limits.a_max);
  rd.number(lim, "j_max_mps3", "limits", sc.limits.j_max);
  rd.number(lim, "tau_min_mps2", "limits", sc.limits.tau_min);
  rd.number(lim, "tau_max_mps2", "limits", sc.limits.tau_max);
  rd.integer(lim, "kappa", "limits", sc.limits.kappa);
  rd.number(lim, "obstacle_margin_m", "limits", sc.limits.obstacle_margin);
  rd.number(lim, "corridor_margin_m", "limits", sc.limits.corridor_margin);
  rd.number(lim, "rho", "limits", sc.limits.rho);

  const YAML::Node w = root["weights"];
  rd.check_keys(w, "weights", {"velocity", "dynamics", "thrust", "cable", "obstacle"});
  rd.number(w, "velocity", "weights", sc.weights.velocity);
  rd.number(w, "dynamics", "weights", sc.weights.dynamics);
  rd.number(w, "thrust", "weights", sc.weights.thrust);
  rd.number(w, "cable", "weights", sc.weights.cable);
  rd.number(w, "obstacle", "weights", sc.weights.obstacle);

  const YAML::Node pl = root["planner"];
  rd.check_keys(pl, "planner",
                {"min_duration_s", "fixed_duration_s", "initial_duration_s", "max_iterations",
                 "memory", "gradient_tolerance", "penalty_tolerance", "dense_check_factor",
                 "corridor_tolerance_m2"});
  rd.number(pl, "min_duration_s", "planner", sc.planner.min_duration);
  double fixed = std::nan("");
  rd.number(pl, "fixed_duration_s", "planner", fixed);
  if (!std::isnan(fixed)) sc.planner.fixed_duration = fixed;
  rd.number(pl, "initial_duration_s", "planner", sc.planner.initial_duration);
  rd.integer(pl, "max_iterations", "planner", sc.planner.max_iterations);
  rd.integer(pl, "memory", "planner", sc.planner.memory);
  rd.number(pl, "gradient_tolerance", "planner", sc.planner.gradient_tolerance);
  rd.number(pl, "penalty_tolerance", "planner", sc.planner.penalty_tolerance);
  rd.integer(pl, "dense_check_factor", "planner", sc.planner.dense_check_factor);
  rd.number(pl, "corridor_tolerance_m2", "planner", sc.planner.corridor_tolerance);

  const YAML::Node veh = root["vehicles"];
  rd.check_keys(veh, "vehicles", {"end_droid_mass_kg", "payload_drone_mass_kg", "attach_mass_kg"});
  rd.number(veh, "end_droid_mass_kg", "vehicles", sc.end_droid.mass);
  rd.number(veh, "payload_drone_mass_kg", "vehicles", sc.payload_drone.mass);
  rd.number(veh, "attach_mass_kg", "vehicles", sc.attach_mass);
  sc.end_droid.gravity = gravity_vector(g);
  sc.payload_drone.gravity = gravity_vector(g);

  const YAML::Node sim = root["simulation"];
  rd.check_keys(sim, "simulation",
                {"dt_s", "kp", "kd", "hold_time_s", "tether_stiffness_npm", "damping_ratio",
                 "max_retrieval_time_s"});
  rd.number(sim, "dt_s", "simulation", sc.simulation.dt);
  rd.number(sim, "kp", "simulation", sc.simulation.kp);
  rd.number(sim, "kd", "simulation", sc.simulation.kd);
  rd.number(sim, "hold_time_s", "simulation", sc.simulation.hold_time);
  rd.number(sim, "tether_stiffness_npm", "simulation", sc.simulation.tether.stiffness);
  rd.number(sim, "damping_ratio", "simulation", sc.simulation.tether.damping_ratio);
  rd.number(sim, "max_retrieval_time_s", "simulation", sc.simulation.max_retrieval_time);
  sc.simulation.corridor_tolerance = sc.planner.corridor_tolerance;

  if (!(g > 0.0)) invalid("scenario.gravity_mps2 must be positive");

  if (std::isnan(initial)) {
    sc.auto_initial_length = true;
    derive_initial_length(sc);
  } else {
    sc.winch.initial_length = initial;
  }

  sc.validate();
  return sc;
}

void derive_initial_length(Scenario& sc) {
  if (!sc.auto_initial_length) return;
  try {
    const CableBounds b = cable_bounds(sc.start.position, sc.anchor, 0.0, sc.cable);
    sc.winch.initial_length = 0.5 * (b.l_min + b.l_max);
  } catch (const Error& e) {
    invalid(std::string("cannot derive winch.initial_length_m: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace tetherplan
