#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanexit/closing_speed.hpp"
#include "lanexit/config.hpp"
#include "lanexit/depth_uncertainty.hpp"
#include "lanexit/error.hpp"
#include "lanexit/path_planner.hpp"
#include "lanexit/scenario.hpp"

namespace py = pybind11;
using namespace lanexit;

namespace {

using Point = std::pair<double, double>;

Vec2 to_vec(const Point& p) { return {p.first, p.second}; }
Point to_point(Vec2 v) { return {v.x, v.y}; }

py::dict estimate_dict(const DepthEstimate& e) {
  py::dict d;
  d["measured"] = e.measured;
  d["computed"] = e.computed;
  d["lower"] = e.lower;
  d["upper"] = e.upper;
  return d;
}

py::dict speed_dict(const ClosingSpeedEstimate& s) {
  py::dict d;
  d["t1"] = s.t1;
  d["t2"] = s.t2;
  d["x1"] = s.first.computed;
  d["x2"] = s.second.computed;
  d["v_nom"] = s.v_nom;
  d["v_upper"] = s.v_upper;
  d["v_lower"] = s.v_lower;
  d["gamma_upper"] = s.gamma_upper();
  return d;
}

py::dict simulate(const std::string& config_path, std::optional<std::string> output_dir,
                  std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  ScenarioTrace trace;
  {
    py::gil_scoped_release release;
    trace = run_scenario(cfg);
    if (output_dir) write_trace(trace, cfg, *output_dir);
  }
  py::list intersections;
  for (const auto& o : trace.intersections) {
    py::dict d;
    d["arrival_time"] = o.arrival_time;
    d["proceed_time"] = o.proceed_time;
    d["completion_time"] = o.completion_time;
    d["wait_time"] = o.wait_time();
    d["wait_ticks"] = o.wait_ticks;
    d["traversal_time"] = o.traversal_time;
    intersections.append(d);
  }
  py::dict result;
  result["complete"] = trace.complete;
  result["end_time"] = trace.end_time;
  result["ticks"] = trace.tick_count;
  result["sample_count"] = trace.sample_count;
  result["min_separation"] = trace.min_separation;
  result["min_separation_time"] = trace.min_separation_t;
  result["min_separation_neighbor"] = trace.min_separation_id;
  result["deadlock_report"] = trace.deadlock_report;
  result["intersections"] = intersections;
  result["summary"] = format_summary(trace, cfg);
  return result;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Depth-uncertainty aware lane-exit planning";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), message.c_str());
    }
  });

  py::class_<DepthErrorModel>(m, "DepthErrorModel")
      .def(py::init<double, double, double, double>(), py::arg("beta1") = 0.002797,
           py::arg("beta2") = -0.004249, py::arg("beta3") = 0.007311, py::arg("r_squared") = 0.9)
      .def_property_readonly("beta1", &DepthErrorModel::beta1)
      .def_property_readonly("beta2", &DepthErrorModel::beta2)
      .def_property_readonly("beta3", &DepthErrorModel::beta3)
      .def_property_readonly("r_squared", &DepthErrorModel::r_squared)
      .def_property_readonly("uncertainty_factor", &DepthErrorModel::uncertainty_factor)
      .def("error", [](const DepthErrorModel& self, double x) { return error_at(self, x); }, py::arg("x"))
      .def("solve_depth", [](const DepthErrorModel& self, double x_m) { return solve_depth(self, x_m); },
           py::arg("measured"))
      .def(
          "bounds",
          [](const DepthErrorModel& self, double x) {
            const auto b = depth_bounds(self, x);
            return std::make_pair(b.lower, b.upper);
          },
          py::arg("x"), "(lower, upper) bounds on computed depth x; lower is None below the domain")
      .def(
          "estimate",
          [](const DepthErrorModel& self, double x_m) { return estimate_dict(estimate_from_measurement(self, x_m)); },
          py::arg("measured"))
      .def("__repr__", [](const DepthErrorModel& self) {
        return "DepthErrorModel(beta1=" + std::to_string(self.beta1()) + ", beta2=" + std::to_string(self.beta2()) +
               ", beta3=" + std::to_string(self.beta3()) + ", r_squared=" + std::to_string(self.r_squared()) + ")";
      });

  m.def(
      "next_sample_depth",
      [](const DepthErrorModel& model, double epsilon, double x1) {
        return next_sample_depth(SamplingPlan(epsilon, model), x1);
      },
      py::arg("model"), py::arg("epsilon"), py::arg("x1"),
      "Computed depth at which the next sample keeps the closing-speed deviation at epsilon.");

  m.def(
      "closing_speeds",
      [](const DepthErrorModel& model, double epsilon, const std::vector<double>& t,
         const std::vector<double>& measured) {
        if (t.size() != measured.size()) throw Error(ErrorCode::kValidation, "t and measured differ in length");
        std::vector<DepthSample> samples;
        samples.reserve(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) samples.push_back({t[i], measured[i]});
        py::list out;
        for (const auto& s : sample_stream(SamplingPlan(epsilon, model), DepthStream(std::move(samples))))
          out.append(speed_dict(s));
        return out;
      },
      py::arg("model"), py::arg("epsilon"), py::arg("t"), py::arg("measured"));

  py::class_<LaneExitPath>(m, "LaneExitPath")
      .def(py::init([](Point p_i, Point p_f, double theta_i, double theta_f) {
             return LaneExitPath::from_geometry({to_vec(p_i), to_vec(p_f), theta_i, theta_f});
           }),
           py::arg("p_i"), py::arg("p_f"), py::arg("theta_i"), py::arg("theta_f"))
      .def_property_readonly("p_i", [](const LaneExitPath& p) { return to_point(p.p_i()); })
      .def_property_readonly("p_int", [](const LaneExitPath& p) { return to_point(p.p_int()); })
      .def_property_readonly("p_f", [](const LaneExitPath& p) { return to_point(p.p_f()); })
      .def_property_readonly("arc_length", &LaneExitPath::arc_length)
      .def_property_readonly("convex_hull",
                             [](const LaneExitPath& p) {
                               std::vector<Point> out;
                               for (Vec2 v : p.convex_hull()) out.push_back(to_point(v));
                               return out;
                             })
      .def("evaluate", [](const LaneExitPath& p, double tau) { return to_point(p.evaluate(tau)); }, py::arg("tau"))
      .def("heading", &LaneExitPath::heading, py::arg("tau"))
      .def("tau_at_arc_length", &LaneExitPath::arc_length_to_tau, py::arg("s"))
      .def("traversal_time", &LaneExitPath::traversal_time, py::arg("speed"));

  m.def("simulate", &simulate, py::arg("config"), py::arg("output") = std::nullopt, py::arg("seed") = std::nullopt,
        "Run a scenario file; writes traces when an output directory is given.");
}
