#include "tetherplan/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace tetherplan;

namespace {

py::dict cost_dict(const CostBreakdown& c) {
  py::dict d;
  d["smoothness"] = c.smoothness;
  d["time"] = c.time;
  d["velocity"] = c.velocity;
  d["acceleration"] = c.acceleration;
  d["jerk"] = c.jerk;
  d["thrust"] = c.thrust;
  d["obstacle"] = c.obstacle;
  d["cable"] = c.cable;
  d["total"] = c.total;
  return d;
}

Eigen::MatrixXd table_matrix(const CsvTable& t, std::size_t first_column) {
  Eigen::MatrixXd m(t.rows().size(), t.header().size() - first_column);
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    for (std::size_t j = first_column; j < t.header().size(); ++j) {
      m(i, j - first_column) = parse_number(t.rows()[i][j]);
    }
  }
  return m;
}

py::dict telemetry_dict(const TelemetryLog& log) {
  const std::size_t n = log.records.size();
  Eigen::VectorXd t(n), l_min(n), l_now(n), l_max(n), t_droid(n), t_anchor(n), thrust(n), swing(n);
  Eigen::MatrixX3d pos(n, 3), vel(n, 3), ref(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const TelemetryRecord& r = log.records[i];
    t(i) = r.time;
    pos.row(i) = r.position.transpose();
    vel.row(i) = r.velocity.transpose();
    ref.row(i) = r.reference.transpose();
    l_min(i) = r.l_min;
    l_now(i) = r.l_now;
    l_max(i) = r.l_max;
    t_droid(i) = r.tension_end_droid;
    t_anchor(i) = r.tension_payload_drone;
    thrust(i) = r.thrust;
    swing(i) = r.swing_angle;
  }
  py::dict d;
  d["t"] = t;
  d["position"] = pos;
  d["velocity"] = vel;
  d["reference"] = ref;
  d["l_min"] = l_min;
  d["l_now"] = l_now;
  d["l_max"] = l_max;
  d["tension_droid"] = t_droid;
  d["tension_anchor"] = t_anchor;
  d["thrust"] = thrust;
  d["swing_angle"] = swing;
  d["corridor_violations"] = log.corridor_violations;
  d["max_corridor_violation"] = log.max_corridor_violation;
  d["max_tracking_error"] = log.max_tracking_error;
  d["peak_tension"] = log.peak_tension;
  d["duration"] = log.duration;
  d["completed"] = log.completed;
  return d;
}

const UniformPolyTrajectory& planned(const PlanReport& r) {
  if (r.plan.trajectory.segment_count() == 0) {
    throw Error(ErrorCode::InvalidArgument, "plan produced no trajectory: " + r.message);
  }
  return r.plan.trajectory;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Winch-aware trajectory planning for a tethered end droid";

  py::register_exception<Error>(m, "TetherplanError", PyExc_RuntimeError);

  py::class_<CableProperties>(m, "CableProperties")
      .def(py::init<>())
      .def_readwrite("mass_per_length", &CableProperties::mass_per_length)
      .def_readwrite("gravity", &CableProperties::gravity)
      .def_readwrite("sag_limit", &CableProperties::sag_limit)
      .def_readwrite("attachment_offset", &CableProperties::attachment_offset)
      .def("weight_per_length", &CableProperties::weight_per_length);

  py::class_<CatenarySolution>(m, "CatenarySolution")
      .def_readonly("a", &CatenarySolution::a)
      .def_readonly("T0", &CatenarySolution::T0)
      .def_readonly("x_a", &CatenarySolution::x_a)
      .def_readonly("x_b", &CatenarySolution::x_b)
      .def_readonly("length", &CatenarySolution::length)
      .def("height_at", &CatenarySolution::height_at)
      .def("tension_at", [](const CatenarySolution& s, double x) { return tension_at(s, x); })
      .def("max_sag_below_chord", [](const CatenarySolution& s) { return max_sag_below_chord(s); })
      .def("shape", [](const CatenarySolution& s, int n) {
        const auto pts = sample_shape(s, n);
        Eigen::MatrixX2d out(pts.size(), 2);
        for (std::size_t i = 0; i < pts.size(); ++i) out.row(i) = pts[i].transpose();
        return out;
      });

  m.def(
      "solve_catenary",
      [](double span, double rise, double length, const CableProperties& props) {
        return solve_catenary(PlanarConfiguration{span, rise}, length, props);
      },
      py::arg("span"), py::arg("rise"), py::arg("length"), py::arg("cable") = CableProperties{});
  m.def(
      "max_length",
      [](double span, double rise, const CableProperties& props) {
        return max_length(PlanarConfiguration{span, rise}, props);
      },
      py::arg("span"), py::arg("rise"), py::arg("cable") = CableProperties{});
  m.def("min_length", &min_length, py::arg("droid"), py::arg("anchor"));
  m.def(
      "cable_bounds",
      [](const Vec3& droid, const Vec3& anchor, double l_now, const CableProperties& props) {
        const CableBounds b = cable_bounds(droid, anchor, l_now, props);
        return py::make_tuple(b.l_min, b.l_max);
      },
      py::arg("droid"), py::arg("anchor"), py::arg("l_now") = 0.0,
      py::arg("cable") = CableProperties{});

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_static("load", &load_scenario, py::arg("path"))
      .def_static("parse", &parse_scenario, py::arg("text"), py::arg("source") = "<string>")
      .def_readwrite("name", &Scenario::name)
      .def_property(
          "start", [](const Scenario& s) { return s.start.position; },
          [](Scenario& s, const Vec3& v) { s.start.position = v; })
      .def_readwrite("goal", &Scenario::goal_position)
      .def_readwrite("anchor", &Scenario::anchor)
      .def_readwrite("segments", &Scenario::segments)
      .def_readwrite("cable", &Scenario::cable)
      .def_readwrite("attach_mass", &Scenario::attach_mass)
      .def_property(
          "payout_speed", [](const Scenario& s) { return s.winch.payout_speed; },
          [](Scenario& s, double v) { s.winch.payout_speed = v; })
      .def_property(
          "initial_length", [](const Scenario& s) { return s.winch.initial_length; },
          [](Scenario& s, double v) {
            s.winch.initial_length = v;
            s.auto_initial_length = false;
          })
      .def("set", [](Scenario& s, const std::string& name, double value) {
        set_parameter(s, name, value);
        derive_initial_length(s);
      })
      .def("validate", &Scenario::validate);

  m.def("parameter_names", &sweep_parameter_names);

  py::class_<PlanReport>(m, "PlanReport")
      .def_readonly("exit_code", &PlanReport::exit_code)
      .def_readonly("message", &PlanReport::message)
      .def_property_readonly("ok", [](const PlanReport& r) { return r.exit_code == kExitOk; })
      .def_property_readonly("status", [](const PlanReport& r) { return to_string(r.plan.status); })
      .def_property_readonly("iterations", [](const PlanReport& r) { return r.plan.iterations; })
      .def_property_readonly("duration",
                             [](const PlanReport& r) { return planned(r).total_duration(); })
      .def_property_readonly("cost", [](const PlanReport& r) { return cost_dict(r.plan.cost); })
      .def_property_readonly("max_squared_violation",
                             [](const PlanReport& r) { return r.corridor.max_squared_violation; })
      .def_property_readonly("min_margin", [](const PlanReport& r) { return r.corridor.min_margin; })
      .def_property_readonly(
          "coefficients", [](const PlanReport& r) { return planned(r).coefficients(); })
      .def(
          "evaluate",
          [](const PlanReport& r, double t, int order) { return planned(r).evaluate(t, order); },
          py::arg("t"), py::arg("order") = 0)
      .def(
          "samples",
          [](const PlanReport& r, int intervals) {
            return table_matrix(samples_table(planned(r), intervals), 0);
          },
          py::arg("intervals") = 320)
      .def("corridor", [](const PlanReport& r) { return table_matrix(corridor_table(r.corridor), 0); })
      .def("write", [](const PlanReport& r, const Scenario& s, const std::filesystem::path& out) {
        planned(r);
        write_plan_outputs(r, s, out);
      });

  m.def(
      "plan",
      [](Scenario s, std::optional<double> fixed_duration) {
        PlanOptions o;
        o.fixed_duration = fixed_duration;
        apply_plan_options(s, o);
        py::gil_scoped_release release;
        return run_plan(s);
      },
      py::arg("scenario"), py::arg("fixed_duration") = py::none());

  m.def(
      "simulate_pickup",
      [](const Scenario& s, const PlanReport& r) {
        TelemetryLog log;
        {
          py::gil_scoped_release release;
          log = simulate_pickup(s, planned(r));
        }
        return telemetry_dict(log);
      },
      py::arg("scenario"), py::arg("plan"));

  m.def(
      "simulate_retrieval",
      [](const Scenario& s, std::optional<Vec3> start, std::optional<double> attach_mass) {
        TelemetryLog log;
        {
          py::gil_scoped_release release;
          log = simulate_retrieval(s, attach_mass.value_or(s.attach_mass),
                                   start.value_or(s.goal_position));
        }
        return telemetry_dict(log);
      },
      py::arg("scenario"), py::arg("start") = py::none(), py::arg("attach_mass") = py::none());

  m.def(
      "sweep",
      [](const Scenario& s, const std::vector<std::pair<std::string, std::vector<double>>>& axes,
         int jobs, bool simulate) {
        std::vector<SweepAxis> ax;
        for (const auto& [name, values] : axes) ax.push_back(SweepAxis{name, values});
        SweepOptions o;
        o.jobs = jobs;
        o.simulate = simulate;
        CsvTable t;
        {
          py::gil_scoped_release release;
          t = run_sweep(s, ax, o);
        }
        return py::make_tuple(t.header(), t.rows());
      },
      py::arg("scenario"), py::arg("axes"), py::arg("jobs") = 0, py::arg("simulate") = false);

  m.def(
      "run_checks",
      [](std::uint64_t seed, std::optional<Scenario> base) {
        CheckOptions o;
        o.seed = seed;
        const auto results = run_checks(base.value_or(Scenario{}), o);
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["metric"] = r.metric;
          d["threshold"] = r.threshold;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("scenario") = py::none());
}
