#pragma once

// Scenario description shared by the planner, the simulator and the CLI, and
// its YAML loader.
//
// Every physical key carries its SI unit as a suffix, e.g. `position_m`,
// `payout_speed_mps`, `unit_mass_kgpm`. The cable mass may also be given as
// `unit_mass_gpm` (grams per metre), converted on load.

#include "tetherplan/cable_model.hpp"
#include "tetherplan/cost_terms.hpp"
#include "tetherplan/dynamics.hpp"
#include "tetherplan/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tetherplan {

struct PlannerSettings {
  double min_duration = 0.5;             // s, lower bound of the positive time map
  std::optional<double> fixed_duration;  // s, freezes T when set
  double initial_duration = 0.0;         // s, 0 picks a guess from distance and winch
  int max_iterations = 500;
  int memory = 8;
  double gradient_tolerance = 1e-5;
  double penalty_tolerance = 1e-6;  // unweighted penalty sum counted as satisfied
  int dense_check_factor = 10;
  double corridor_tolerance = 1e-3;  // m^2

  void validate() const;
};

struct Scenario {
  std::string name = "scenario";
  BoundaryState start;
  double start_yaw = 0.0;
  Vec3 goal_position = Vec3::Zero();
  Vec3 goal_velocity = Vec3::Zero();
  Vec3 anchor = Vec3(0.0, 0.0, 3.0);  // hovering payload drone
  std::vector<ObstaclePlane> obstacles;
  CableProperties cable;
  WinchSchedule winch;
  bool cable_constraint = true;
  Limits limits;
  PenaltyWeights weights;
  int segments = 8;
  PlannerSettings planner;
  DroneParams end_droid;
  DroneParams payload_drone{1.5, gravity_vector()};
  SimulationConfig simulation;
  double attach_mass = 0.0;  // kg picked up at the target
  bool auto_initial_length = false;  // winch starts mid-corridor at the start point

  Vec3 gravity() const { return end_droid.gravity; }
  void validate() const;
};

/// Sets the winch initial length to the middle of the corridor at the start
/// point when auto_initial_length is set.
void derive_initial_length(Scenario& scenario);

/// Parses a scenario file. Throws ParseError (with line and key) for
/// malformed input and ValidationError for values that violate invariants.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& yaml_text, const std::string& source = "<string>");

}  // namespace tetherplan
