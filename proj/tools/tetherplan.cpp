#include "tetherplan/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace tetherplan;

  CLI::App app{"Winch-aware trajectory planner for a tethered end droid"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";

  auto* plan = app.add_subcommand("plan", "Optimise a trajectory and write CSV outputs");
  PlanOptions plan_opts;
  double fixed_duration = 0.0;
  int dense_factor = 0;
  plan->add_option("--scenario", scenario, "Scenario YAML file")->required();
  plan->add_option("--out", out_dir, "Output directory")->capture_default_str();
  plan->add_option("--seed", plan_opts.seed, "Recorded for reproducibility; planning is deterministic");
  auto* fixed_opt = plan->add_option("--fixed-duration", fixed_duration, "Freeze the total duration (s)")
                        ->check(CLI::PositiveNumber);
  auto* dense_opt = plan->add_option("--dense-check-factor", dense_factor,
                                     "Corridor re-check intervals per penalty sample")
                        ->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Simulate tracking of a planned trajectory");
  SimulateOptions sim_opts;
  std::string trajectory_path;
  sim->add_option("--scenario", scenario, "Scenario YAML file")->required();
  sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* traj_opt = sim->add_option("--trajectory", trajectory_path, "Trajectory CSV (default <out>/trajectory.csv)");
  sim->add_flag("--retrieval", sim_opts.retrieval, "Append passive retrieval after the pickup");
  sim->add_flag("--retrieval-only", sim_opts.retrieval_only, "Simulate only passive retrieval from the goal");

  auto* sweep = app.add_subcommand("sweep", "Run the planner over a parameter grid");
  SweepOptions sweep_opts;
  std::vector<std::string> params;
  sweep->add_option("--scenario", scenario, "Base scenario YAML file")->required();
  sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sweep->add_option("--param", params, "name=v1,v2,... or name=start:stop:step (repeatable)")
      ->required()
      ->take_all();
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads (0: all cores)")->capture_default_str();
  sweep->add_flag("--simulate", sweep_opts.simulate, "Also simulate tracking for each run");
  sweep->add_option("--seed", sweep_opts.plan.seed, "Recorded for reproducibility");
  sweep->footer("Parameters: " + [] {
    std::string s;
    for (const auto& n : sweep_parameter_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());

  auto* check = app.add_subcommand("check", "Run numerical self-checks");
  CheckOptions check_opts;
  std::string check_scenario;
  check->add_option("--scenario", check_scenario, "Optional base scenario YAML file");
  check->add_option("--seed", check_opts.seed, "Seed for the randomised instances")->capture_default_str();
  check->add_option("--perturb-gradient", check_opts.gradient_perturbation)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (*plan) {
    if (*fixed_opt) plan_opts.fixed_duration = fixed_duration;
    if (*dense_opt) plan_opts.dense_check_factor = dense_factor;
    return cmd_plan(scenario, out_dir, plan_opts, std::cout, std::cerr);
  }
  if (*sim) {
    if (*traj_opt) sim_opts.trajectory = trajectory_path;
    return cmd_simulate(scenario, out_dir, sim_opts, std::cout, std::cerr);
  }
  if (*sweep) {
    std::vector<SweepAxis> axes;
    try {
      for (const auto& p : params) axes.push_back(parse_sweep_axis(p));
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInput;
    }
    return cmd_sweep(scenario, axes, out_dir, sweep_opts, std::cout, std::cerr);
  }
  std::optional<std::string> path;
  if (!check_scenario.empty()) path = check_scenario;
  return cmd_check(path, check_opts, std::cout, std::cerr);
}
