#pragma once

// Command implementations behind the tetherplan CLI. Each command returns a
// process exit code:
//   0 success, 1 failed self-check, 2 parse/validation error,
//   3 optimisation failure, 4 cable corridor violation.

#include "tetherplan/csv.hpp"
#include "tetherplan/diagnostics.hpp"
#include "tetherplan/dynamics.hpp"
#include "tetherplan/optimizer.hpp"
#include "tetherplan/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tetherplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInput = 2,
  kExitOptimization = 3,
  kExitCorridor = 4,
};

struct PlanOptions {
  std::optional<double> fixed_duration;
  std::optional<int> dense_check_factor;
  std::uint64_t seed = 0;
};

struct PlanReport {
  PlanResult plan;
  CorridorReport corridor;
  int exit_code = kExitOk;
  std::string message;
};

/// Applies command-line overrides to a scenario.
void apply_plan_options(Scenario& scenario, const PlanOptions& options);

/// Runs the planner and the dense corridor check; never throws on planner
/// failure, the outcome is in exit_code and message.
PlanReport run_plan(const Scenario& scenario);

// CSV schemas.
CsvTable trajectory_table(const UniformPolyTrajectory& traj);
UniformPolyTrajectory trajectory_from_table(const CsvTable& table);
CsvTable samples_table(const UniformPolyTrajectory& traj, int intervals);
CsvTable corridor_table(const CorridorReport& report);
CsvTable cost_table(const PlanReport& report, const Scenario& scenario);
CsvTable history_table(const std::vector<IterationRecord>& history);
CsvTable telemetry_table(const TelemetryLog& pickup, const TelemetryLog* retrieval);

/// Writes trajectory.csv, samples.csv, corridor.csv, cost.csv and history.csv.
void write_plan_outputs(const PlanReport& report, const Scenario& scenario,
                        const std::filesystem::path& out_dir);

int cmd_plan(const std::string& scenario_path, const std::filesystem::path& out_dir,
             const PlanOptions& options, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::optional<std::filesystem::path> trajectory;  // default: <out>/trajectory.csv
  bool retrieval = false;                           // append passive retrieval
  bool retrieval_only = false;
};

int cmd_simulate(const std::string& scenario_path, const std::filesystem::path& out_dir,
                 const SimulateOptions& options, std::ostream& out, std::ostream& err);

/// One sweep axis: a scenario parameter and the values it takes.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// Parses "name=v1,v2,..." or "name=start:stop:step" (stop inclusive).
SweepAxis parse_sweep_axis(const std::string& text);

/// Names accepted by set_parameter.
std::vector<std::string> sweep_parameter_names();
void set_parameter(Scenario& scenario, const std::string& name, double value);

struct SweepOptions {
  int jobs = 0;  // 0: hardware concurrency
  bool simulate = false;
  PlanOptions plan;
};

/// Runs the Cartesian product of the axes; one row per grid point, in grid
/// order, written by a single collector after all workers finish.
CsvTable run_sweep(const Scenario& base, const std::vector<SweepAxis>& axes,
                   const SweepOptions& options);

int cmd_sweep(const std::string& scenario_path, const std::vector<SweepAxis>& axes,
              const std::filesystem::path& out_dir, const SweepOptions& options, std::ostream& out,
              std::ostream& err);

int cmd_check(const std::optional<std::string>& scenario_path, const CheckOptions& options,
              std::ostream& out, std::ostream& err);

}  // namespace tetherplan
