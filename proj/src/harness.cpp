#include "tetherplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace tetherplan {
namespace {

namespace fs = std::filesystem;

const char* const kAxisNames[3] = {"x", "y", "z"};

bool is_input_error(ErrorCode c) {
  return c == ErrorCode::ParseError || c == ErrorCode::ValidationError ||
         c == ErrorCode::IoError || c == ErrorCode::InvalidArgument;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

using Setter = std::function<void(Scenario&, double)>;

const std::map<std::string, Setter>& parameter_table() {
  static const std::map<std::string, Setter> table = {
      {"start.x", [](Scenario& s, double v) { s.start.position.x() = v; }},
      {"start.y", [](Scenario& s, double v) { s.start.position.y() = v; }},
      {"start.z", [](Scenario& s, double v) { s.start.position.z() = v; }},
      {"goal.x", [](Scenario& s, double v) { s.goal_position.x() = v; }},
      {"goal.y", [](Scenario& s, double v) { s.goal_position.y() = v; }},
      {"goal.z", [](Scenario& s, double v) { s.goal_position.z() = v; }},
      {"anchor.x", [](Scenario& s, double v) { s.anchor.x() = v; }},
      {"anchor.y", [](Scenario& s, double v) { s.anchor.y() = v; }},
      {"anchor.z", [](Scenario& s, double v) { s.anchor.z() = v; }},
      {"segments", [](Scenario& s, double v) { s.segments = static_cast<int>(std::lround(v)); }},
      {"cable.sag_limit_m", [](Scenario& s, double v) { s.cable.sag_limit = v; }},
      {"cable.unit_mass_gpm", [](Scenario& s, double v) { s.cable.mass_per_length = v * 1e-3; }},
      {"cable.attachment_offset_m", [](Scenario& s, double v) { s.cable.attachment_offset = v; }},
      {"winch.payout_speed_mps", [](Scenario& s, double v) { s.winch.payout_speed = v; }},
      {"winch.initial_length_m",
       [](Scenario& s, double v) {
         s.winch.initial_length = v;
         s.auto_initial_length = false;
       }},
      {"winch.capacity_m", [](Scenario& s, double v) { s.winch.capacity = v; }},
      {"limits.v_max_mps", [](Scenario& s, double v) { s.limits.v_max = v; }},
      {"limits.a_max_mps2", [](Scenario& s, double v) { s.limits.a_max = v; }},
      {"limits.j_max_mps3", [](Scenario& s, double v) { s.limits.j_max = v; }},
      {"limits.kappa", [](Scenario& s, double v) { s.limits.kappa = static_cast<int>(std::lround(v)); }},
      {"limits.rho", [](Scenario& s, double v) { s.limits.rho = v; }},
      {"limits.corridor_margin_m", [](Scenario& s, double v) { s.limits.corridor_margin = v; }},
      {"weights.velocity", [](Scenario& s, double v) { s.weights.velocity = v; }},
      {"weights.dynamics", [](Scenario& s, double v) { s.weights.dynamics = v; }},
      {"weights.thrust", [](Scenario& s, double v) { s.weights.thrust = v; }},
      {"weights.cable", [](Scenario& s, double v) { s.weights.cable = v; }},
      {"weights.obstacle", [](Scenario& s, double v) { s.weights.obstacle = v; }},
  };
  return table;
}

int load(const std::string& path, Scenario& sc, std::ostream& err) {
  try {
    sc = load_scenario(path);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

void print_cost(std::ostream& out, const CostBreakdown& c) {
  out << "  smoothness   " << format_number(c.smoothness) << "\n"
      << "  duration     " << format_number(c.time) << " s\n"
      << "  velocity     " << format_number(c.velocity) << "\n"
      << "  acceleration " << format_number(c.acceleration) << "\n"
      << "  jerk         " << format_number(c.jerk) << "\n"
      << "  thrust       " << format_number(c.thrust) << "\n"
      << "  obstacle     " << format_number(c.obstacle) << "\n"
      << "  cable        " << format_number(c.cable) << "\n"
      << "  total        " << format_number(c.total) << "\n";
}

std::vector<double> cost_values(const CostBreakdown& c) {
  return {c.smoothness, c.time,     c.velocity, c.acceleration, c.jerk,
          c.thrust,     c.obstacle, c.cable,    c.total};
}

const std::vector<std::string>& cost_names() {
  static const std::vector<std::string> names = {"smoothness", "time",     "velocity",
                                                 "acceleration", "jerk",   "thrust",
                                                 "obstacle",   "cable",    "total"};
  return names;
}

// Empty when some admissible duration brings the winch into the goal corridor.
std::string goal_reachability_warning(const Scenario& sc) {
  if (!sc.cable_constraint) return {};
  const CableBounds b =
      cable_bounds(sc.goal_position, sc.anchor, 0.0, sc.cable);
  const WinchSchedule& w = sc.winch;
  double lo = 0.0, hi = 0.0;
  if (sc.planner.fixed_duration) {
    lo = hi = w.length_at(*sc.planner.fixed_duration);
  } else if (w.payout_speed > 0.0) {
    lo = w.length_at(sc.planner.min_duration);
    hi = w.capacity;
  } else if (w.payout_speed < 0.0) {
    lo = w.stow_length;
    hi = w.length_at(sc.planner.min_duration);
  } else {
    lo = hi = w.initial_length;
  }
  if (hi < b.l_min || lo > b.l_max) {
    return "winch lengths [" + format_number(lo) + ", " + format_number(hi) +
           "] m never meet the goal corridor [" + format_number(b.l_min) + ", " +
           format_number(b.l_max) + "] m";
  }
  return {};
}

}  // namespace

void apply_plan_options(Scenario& sc, const PlanOptions& o) {
  if (o.fixed_duration) sc.planner.fixed_duration = *o.fixed_duration;
  if (o.dense_check_factor) sc.planner.dense_check_factor = *o.dense_check_factor;
}

PlanReport run_plan(const Scenario& sc) {
  PlanReport rep;
  try {
    sc.validate();
    if (sc.cable_constraint) {
      const double needed = min_length(attachment_point(sc.goal_position, sc.cable), sc.anchor);
      if (needed > sc.winch.capacity) {
        std::ostringstream os;
        os << "goal needs at least " << format_number(needed) << " m of cable but the winch holds "
           << format_number(sc.winch.capacity) << " m";
        rep.exit_code = kExitCorridor;
        rep.message = os.str();
        return rep;
      }
    }
    rep.plan = optimize(sc);
  } catch (const Error& e) {
    rep.exit_code = is_input_error(e.code()) ? kExitInput : kExitOptimization;
    rep.message = e.what();
    return rep;
  }
  if (!std::isfinite(rep.plan.cost.total)) {
    rep.exit_code = kExitOptimization;
    rep.message = "optimisation produced a non-finite cost";
    return rep;
  }
  const int intervals = sc.planner.dense_check_factor * sc.limits.kappa;
  try {
    rep.corridor = check_corridor(rep.plan.trajectory, sc, intervals, sc.planner.corridor_tolerance);
  } catch (const Error& e) {
    rep.exit_code = kExitOptimization;
    rep.message = std::string("corridor check failed: ") + e.what();
    return rep;
  }
  if (sc.cable_constraint && !rep.corridor.passed) {
    rep.exit_code = kExitCorridor;
    rep.message = "cable length leaves the corridor: max squared violation " +
                  format_number(rep.corridor.max_squared_violation) + " m^2";
  } else {
    rep.exit_code = kExitOk;
    rep.message = "ok";
  }
  return rep;
}

CsvTable trajectory_table(const UniformPolyTrajectory& traj) {
  CsvTable t({"segment", "axis", "c0", "c1", "c2", "c3", "c4", "c5", "dT", "N"});
  const Eigen::MatrixXd& c = traj.coefficients();
  for (int s = 0; s < traj.segment_count(); ++s) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<std::string> row = {std::to_string(s), kAxisNames[axis]};
      for (int k = 0; k < 6; ++k) row.push_back(format_number(c(6 * s + k, axis)));
      row.push_back(format_number(traj.segment_duration()));
      row.push_back(std::to_string(traj.segment_count()));
      t.add_row(std::move(row));
    }
  }
  return t;
}

UniformPolyTrajectory trajectory_from_table(const CsvTable& t) {
  const std::size_t seg_col = t.column("segment"), axis_col = t.column("axis"),
                    dt_col = t.column("dT"), n_col = t.column("N");
  std::size_t c_col[6];
  for (int k = 0; k < 6; ++k) c_col[k] = t.column("c" + std::to_string(k));
  if (t.rows().empty()) throw Error(ErrorCode::IoError, "trajectory table has no rows");
  const int n = static_cast<int>(parse_number(t.rows().front()[n_col]));
  const double dt = parse_number(t.rows().front()[dt_col]);
  if (n < 1 || static_cast<int>(t.rows().size()) != 3 * n) {
    throw Error(ErrorCode::IoError, "trajectory table must hold 3 rows per segment");
  }
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Constant(6 * n, 3, NAN);
  for (const auto& row : t.rows()) {
    const int s = static_cast<int>(parse_number(row[seg_col]));
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
      if (row[axis_col] == kAxisNames[a]) axis = a;
    }
    if (s < 0 || s >= n || axis < 0) throw Error(ErrorCode::IoError, "bad segment or axis entry");
    for (int k = 0; k < 6; ++k) coeffs(6 * s + k, axis) = parse_number(row[c_col[k]]);
  }
  if (!coeffs.allFinite()) throw Error(ErrorCode::IoError, "trajectory table is incomplete");
  return UniformPolyTrajectory::from_coefficients(coeffs, dt);
}

CsvTable samples_table(const UniformPolyTrajectory& traj, int intervals) {
  CsvTable t({"t", "x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az"});
  const double T = traj.total_duration();
  for (int i = 0; i <= intervals; ++i) {
    const double time = (i == intervals) ? T : T * i / intervals;
    const Vec3 p = traj.evaluate(time, 0), v = traj.evaluate(time, 1), a = traj.evaluate(time, 2);
    t.add_numbers({time, p.x(), p.y(), p.z(), v.x(), v.y(), v.z(), a.x(), a.y(), a.z()});
  }
  return t;
}

CsvTable corridor_table(const CorridorReport& report) {
  CsvTable t({"t", "l_min", "l_now", "l_max"});
  for (const CorridorSample& s : report.samples) t.add_numbers({s.time, s.l_min, s.l_now, s.l_max});
  return t;
}

CsvTable cost_table(const PlanReport& rep, const Scenario& sc) {
  CsvTable t({"term", "value", "weight", "weighted"});
  const CostBreakdown& c = rep.plan.cost;
  const PenaltyWeights& w = sc.weights;
  const std::vector<std::pair<std::string, std::pair<double, double>>> rows = {
      {"smoothness", {c.smoothness, 1.0}},
      {"time", {c.time, sc.limits.rho}},
      {"velocity", {c.velocity, w.velocity}},
      {"acceleration", {c.acceleration, w.dynamics}},
      {"jerk", {c.jerk, w.dynamics}},
      {"thrust", {c.thrust, w.thrust}},
      {"obstacle", {c.obstacle, w.obstacle}},
      {"cable", {c.cable, w.cable}},
  };
  for (const auto& [name, vw] : rows) {
    t.add_row({name, format_number(vw.first), format_number(vw.second),
               format_number(vw.first * vw.second)});
  }
  t.add_row({"total", format_number(c.total), "1", format_number(c.total)});
  return t;
}

CsvTable history_table(const std::vector<IterationRecord>& history) {
  std::vector<std::string> header = {"iteration", "step", "duration"};
  for (const auto& n : cost_names()) header.push_back(n);
  CsvTable t(header);
  for (const IterationRecord& r : history) {
    std::vector<double> v = {static_cast<double>(r.iteration), r.step, r.duration};
    for (double x : cost_values(r.cost)) v.push_back(x);
    t.add_numbers(v);
  }
  return t;
}

CsvTable telemetry_table(const TelemetryLog& pickup, const TelemetryLog* retrieval) {
  CsvTable t({"phase", "t", "x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az", "ref_x", "ref_y",
              "ref_z", "l_min", "l_now", "l_max", "tension_droid", "tension_anchor", "thrust",
              "swing_angle", "corridor_violation"});
  auto add = [&t](const char* phase, const TelemetryRecord& r, double offset) {
    std::vector<std::string> row = {phase};
    for (double v : {r.time + offset, r.position.x(), r.position.y(), r.position.z(),
                     r.velocity.x(), r.velocity.y(), r.velocity.z(), r.acceleration.x(),
                     r.acceleration.y(), r.acceleration.z(), r.reference.x(), r.reference.y(),
                     r.reference.z(), r.l_min, r.l_now, r.l_max, r.tension_end_droid,
                     r.tension_payload_drone, r.thrust, r.swing_angle}) {
      row.push_back(format_number(v));
    }
    row.push_back(r.corridor_violation ? "1" : "0");
    t.add_row(std::move(row));
  };
  for (const auto& r : pickup.records) add("pickup", r, 0.0);
  if (retrieval) {
    // The first retrieval record coincides with the last pickup instant.
    const bool skip_first = !pickup.records.empty();
    for (std::size_t i = skip_first ? 1 : 0; i < retrieval->records.size(); ++i) {
      add("retrieval", retrieval->records[i], pickup.duration);
    }
  }
  return t;
}

void write_plan_outputs(const PlanReport& rep, const Scenario& sc, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const UniformPolyTrajectory& traj = rep.plan.trajectory;
  const int intervals = sc.planner.dense_check_factor * sc.limits.kappa;
  trajectory_table(traj).write(out_dir / "trajectory.csv");
  samples_table(traj, intervals).write(out_dir / "samples.csv");
  corridor_table(rep.corridor).write(out_dir / "corridor.csv");
  cost_table(rep, sc).write(out_dir / "cost.csv");
  history_table(rep.plan.history).write(out_dir / "history.csv");

  CsvTable summary({"key", "value"});
  summary.add_row({"scenario", one_line(sc.name)});
  summary.add_row({"status", to_string(rep.plan.status)});
  summary.add_row({"iterations", std::to_string(rep.plan.iterations)});
  summary.add_row({"evaluations", std::to_string(rep.plan.evaluations)});
  summary.add_row({"duration_s", format_number(traj.total_duration())});
  summary.add_row({"segments", std::to_string(traj.segment_count())});
  summary.add_row({"gradient_norm", format_number(rep.plan.gradient_norm)});
  summary.add_row({"penalties_satisfied", rep.plan.penalties_satisfied ? "1" : "0"});
  summary.add_row({"dense_intervals", std::to_string(intervals)});
  summary.add_row({"max_squared_violation_m2", format_number(rep.corridor.max_squared_violation)});
  summary.add_row({"min_margin_m", format_number(rep.corridor.min_margin)});
  summary.add_row({"corridor_passed", rep.corridor.passed ? "1" : "0"});
  summary.add_row({"exit_code", std::to_string(rep.exit_code)});
  summary.write(out_dir / "summary.csv");
}

int cmd_plan(const std::string& scenario_path, const fs::path& out_dir, const PlanOptions& options,
             std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(scenario_path, sc, err)) return rc;
  try {
    apply_plan_options(sc, options);
    sc.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (const std::string w = goal_reachability_warning(sc); !w.empty()) {
      out << "warning: goal may be unreachable: " << w << "\n";
    }
  } catch (const Error&) {
    // Bounds that cannot be evaluated surface again in run_plan.
  }

  const auto t0 = std::chrono::steady_clock::now();
  const PlanReport rep = run_plan(sc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (rep.exit_code == kExitInput || rep.exit_code == kExitOptimization ||
      (rep.exit_code == kExitCorridor && rep.plan.trajectory.segment_count() == 0)) {
    err << "error: " << rep.message << "\n";
    return rep.exit_code;
  }
  try {
    write_plan_outputs(rep, sc, out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  out << "scenario " << sc.name << ": " << to_string(rep.plan.status) << " after "
      << rep.plan.iterations << " iterations (" << std::fixed << std::setprecision(3) << wall
      << " s)\n";
  out.unsetf(std::ios::floatfield);
  print_cost(out, rep.plan.cost);
  out << "  corridor     max squared violation " << format_number(rep.corridor.max_squared_violation)
      << " m^2, min margin " << format_number(rep.corridor.min_margin) << " m over "
      << rep.corridor.samples.size() << " samples\n";
  if (rep.plan.status != LbfgsStatus::Converged) {
    out << "warning: optimiser stopped with status " << to_string(rep.plan.status) << "\n";
  }
  if (!rep.plan.penalties_satisfied) {
    out << "warning: residual penalties " << format_number(rep.plan.cost.penalty_sum()) << "\n";
  }
  out << "outputs written to " << out_dir.string() << "\n";
  if (rep.exit_code != kExitOk) err << "error: " << rep.message << "\n";
  return rep.exit_code;
}

int cmd_simulate(const std::string& scenario_path, const fs::path& out_dir,
                 const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (int rc = load(scenario_path, sc, err)) return rc;

  TelemetryLog pickup;
  std::optional<TelemetryLog> retrieval;
  try {
    if (!options.retrieval_only) {
      const fs::path traj_path = options.trajectory.value_or(out_dir / "trajectory.csv");
      if (!fs::exists(traj_path)) {
        err << "error: trajectory artifact " << traj_path.string()
            << " not found (run `tetherplan plan` first)\n";
        return kExitInput;
      }
      UniformPolyTrajectory planned;
      try {
        planned = trajectory_from_table(CsvTable::read(traj_path));
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
      }
      pickup = simulate_pickup(sc, planned);
    }
    if (options.retrieval || options.retrieval_only) {
      const Vec3 from = options.retrieval_only || pickup.records.empty()
                            ? sc.goal_position
                            : pickup.records.back().position;
      retrieval = simulate_retrieval(sc, sc.attach_mass, from);
    }
  } catch (const Error& e) {
    err << "error: simulation failed: " << e.what() << "\n";
    return kExitOptimization;
  }

  try {
    fs::create_directories(out_dir);
    telemetry_table(pickup, retrieval ? &*retrieval : nullptr).write(out_dir / "telemetry.csv");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (!options.retrieval_only) {
    out << "pickup: " << pickup.records.size() << " samples over " << format_number(pickup.duration)
        << " s, max tracking error " << format_number(pickup.max_tracking_error)
        << " m, corridor violations " << pickup.corridor_violations << " (max "
        << format_number(pickup.max_corridor_violation) << " m^2), peak tension "
        << format_number(pickup.peak_tension) << " N\n";
  }
  if (retrieval) {
    out << "retrieval: " << (retrieval->completed ? "stowed" : "not stowed") << " after "
        << format_number(retrieval->duration) << " s, peak tension "
        << format_number(retrieval->peak_tension) << " N\n";
  }
  out << "telemetry written to " << (out_dir / "telemetry.csv").string() << "\n";
  if (!options.retrieval_only && pickup.corridor_violations > 0) return kExitCorridor;
  if (retrieval && !retrieval->completed) return kExitOptimization;
  return kExitOk;
}

std::vector<std::string> sweep_parameter_names() {
  std::vector<std::string> names;
  for (const auto& [k, _] : parameter_table()) names.push_back(k);
  return names;
}

void set_parameter(Scenario& sc, const std::string& name, double value) {
  const auto& table = parameter_table();
  const auto it = table.find(name);
  if (it == table.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name + "'");
  }
  it->second(sc, value);
}

SweepAxis parse_sweep_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::InvalidArgument, "sweep axis must look like name=values: " + text);
  }
  SweepAxis axis;
  axis.name = text.substr(0, eq);
  if (!parameter_table().count(axis.name)) {
    throw Error(ErrorCode::InvalidArgument, "unknown sweep parameter '" + axis.name + "'");
  }
  const std::string spec = text.substr(eq + 1);
  auto number = [&](const std::string& s) {
    try {
      return parse_number(s);
    } catch (const Error&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + s + "' in sweep axis " + axis.name);
    }
  };
  if (std::count(spec.begin(), spec.end(), ':') == 2) {
    const auto c1 = spec.find(':'), c2 = spec.rfind(':');
    const double a = number(spec.substr(0, c1));
    const double b = number(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = number(spec.substr(c2 + 1));
    if (!(step != 0.0) || (b - a) * step < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "sweep range step must move from start to stop");
    }
    const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) throw Error(ErrorCode::InvalidArgument, "sweep range too long");
    for (long i = 0; i < count; ++i) axis.values.push_back(a + static_cast<double>(i) * step);
  } else {
    std::istringstream is(spec);
    std::string item;
    while (std::getline(is, item, ',')) {
      if (!item.empty()) axis.values.push_back(number(item));
    }
  }
  if (axis.values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep axis " + axis.name + " has no values");
  }
  return axis;
}

CsvTable run_sweep(const Scenario& base, const std::vector<SweepAxis>& axes,
                   const SweepOptions& options) {
  std::size_t total = axes.empty() ? 0 : 1;
  for (const SweepAxis& a : axes) total *= a.values.size();
  if (total == 0) throw Error(ErrorCode::InvalidArgument, "sweep grid is empty");

  std::vector<std::string> header = {"run"};
  for (const SweepAxis& a : axes) header.push_back(a.name);
  for (const char* h : {"success", "exit_code", "status", "iterations", "duration_s"}) {
    header.emplace_back(h);
  }
  for (const auto& n : cost_names()) header.push_back(n);
  for (const char* h : {"max_squared_violation_m2", "min_margin_m"}) header.emplace_back(h);
  if (options.simulate) {
    header.emplace_back("max_tracking_error_m");
    header.emplace_back("sim_corridor_violations");
  }
  header.emplace_back("wall_time_s");
  header.emplace_back("message");

  std::vector<std::vector<std::string>> rows(total);
  auto run_one = [&](std::size_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> row = {std::to_string(index)};
    Scenario sc = base;
    std::size_t rem = index;
    std::vector<double> point(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      point[k] = axes[k].values[rem % axes[k].values.size()];
      rem /= axes[k].values.size();
    }
    for (double v : point) row.push_back(format_number(v));

    PlanReport rep;
    std::optional<TelemetryLog> sim;
    try {
      for (std::size_t k = 0; k < axes.size(); ++k) set_parameter(sc, axes[k].name, point[k]);
      derive_initial_length(sc);
      apply_plan_options(sc, options.plan);
      rep = run_plan(sc);
      if (options.simulate && rep.plan.trajectory.segment_count() > 0) {
        sim = simulate_pickup(sc, rep.plan.trajectory);
      }
    } catch (const Error& e) {
      rep.exit_code = is_input_error(e.code()) ? kExitInput : kExitOptimization;
      rep.message = e.what();
    }
    const bool planned = rep.plan.trajectory.segment_count() > 0;
    row.push_back(rep.exit_code == kExitOk ? "1" : "0");
    row.push_back(std::to_string(rep.exit_code));
    row.push_back(planned ? to_string(rep.plan.status) : "none");
    row.push_back(std::to_string(rep.plan.iterations));
    row.push_back(planned ? format_number(rep.plan.trajectory.total_duration()) : "nan");
    for (double v : cost_values(rep.plan.cost)) row.push_back(planned ? format_number(v) : "nan");
    row.push_back(planned ? format_number(rep.corridor.max_squared_violation) : "nan");
    row.push_back(planned ? format_number(rep.corridor.min_margin) : "nan");
    if (options.simulate) {
      row.push_back(sim ? format_number(sim->max_tracking_error) : "nan");
      row.push_back(sim ? std::to_string(sim->corridor_violations) : "nan");
    }
    row.push_back(format_number(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
    row.push_back(one_line(rep.message));
    rows[index] = std::move(row);
  };

  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, static_cast<int>(std::min<std::size_t>(total, 256)));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) run_one(i);
      });
    }
  }

  CsvTable table(header);
  for (auto& r : rows) table.add_row(std::move(r));
  return table;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<SweepAxis>& axes,
              const fs::path& out_dir, const SweepOptions& options, std::ostream& out,
              std::ostream& err) {
  Scenario sc;
  if (int rc = load(scenario_path, sc, err)) return rc;
  CsvTable table;
  try {
    table = run_sweep(sc, axes, options);
    fs::create_directories(out_dir);
    table.write(out_dir / "sweep.csv");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  const std::size_t success_col = table.column("success");
  std::size_t ok = 0;
  for (const auto& r : table.rows()) ok += r[success_col] == "1";
  out << "sweep: " << ok << "/" << table.rows().size() << " runs succeeded; results in "
      << (out_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_check(const std::optional<std::string>& scenario_path, const CheckOptions& options,
              std::ostream& out, std::ostream& err) {
  Scenario sc;
  if (scenario_path) {
    if (int rc = load(*scenario_path, sc, err)) return rc;
  }
  const std::vector<CheckResult> results = run_checks(sc, options);
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
        << r.name << format_number(r.metric) << " < " << format_number(r.threshold) << "  "
        << r.detail << "\n";
  }
  out << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace tetherplan
