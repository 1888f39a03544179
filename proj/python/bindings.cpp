#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "radalloc/report.hpp"
#include "radalloc/scenario.hpp"

namespace py = pybind11;
using namespace radalloc;

namespace {

py::list matrix_to_list(const Matrix& m) {
  py::list rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.append(py::cast(m.row(r)));
  return rows;
}

Matrix list_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw std::invalid_argument("ragged matrix");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

py::dict allocation_dict(const Allocation& a) {
  py::dict d;
  d["times_ms"] = a.times_ms;
  d["lambda"] = a.lambda;
  d["log_lambda"] = a.log_lambda;
  d["active"] = a.active;
  d["criterion"] = a.criterion;
  return d;
}

py::dict report_dict(const RunReport& rep) {
  py::dict d;
  d["name"] = rep.scenario_name;
  d["mode"] = to_string(rep.mode);
  d["horizon_ms"] = rep.horizon_ms;
  d["scale_ms_per_km4"] = rep.scale_ms_per_km4 ? py::cast(*rep.scale_ms_per_km4) : py::none();
  if (rep.mono) {
    d["targets"] = rep.mono->names;
    d["allocation"] = allocation_dict(rep.mono->allocation);
    d["probabilities"] = rep.mono->probabilities;
  }
  if (rep.prob) {
    const auto& a = rep.prob->allocation;
    d["times_ms"] = a.times_ms;
    d["looks"] = a.looks;
    d["probabilities"] = a.probabilities;
    d["criterion"] = a.criterion;
    py::list fits;
    for (const auto& m : a.models) {
      py::dict f;
      f["direction"] = m.direction;
      f["omega"] = m.fit.omega;
      f["exponent"] = m.fit.exponent;
      f["gamma_s"] = m.gamma_s;
      f["tau_ms"] = m.tau_ms;
      f["fit_error"] = m.fit.fit_error;
      fits.append(f);
    }
    d["fits"] = fits;
  }
  if (rep.fleet) {
    const auto& f = *rep.fleet;
    d["step1_times_ms"] = matrix_to_list(f.step1.times_ms);
    d["step1_probabilities"] = matrix_to_list(f.step1.probabilities);
    d["assignment"] = f.assignment.best.sensor_target;
    d["assignment_criterion"] = f.assignment.criterion;
    py::list segs;
    for (const auto& s : f.timeline.segments) segs.append(py::make_tuple(s.sensor, s.target, s.start_ms, s.end_ms));
    d["segments"] = segs;
    d["observed_ms"] = f.timeline.observed_ms;
    d["final_probabilities"] = f.timeline.final_probabilities;
    d["criterion"] = f.timeline.criterion;
    d["static_criterion"] = f.static_criterion;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Detection-time allocation for single radars and sensor fleets";

  py::register_exception<NoAllocationError>(m, "NoAllocationError", PyExc_RuntimeError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  m.def("time_constant", [](double alpha, double p_fa, double range_km, double off_axis_rad) {
    return time_constant(RadarModel{alpha, p_fa}, Geometry{range_km, off_axis_rad});
  }, py::arg("alpha_km4_per_ms"), py::arg("p_fa"), py::arg("range_km"), py::arg("off_axis_rad") = 0.0);
  m.def("optimal_probability", &optimal_probability, py::arg("t_ms"), py::arg("tau_ms"));
  m.def("detection_probability", &detection_probability, py::arg("p_fa"), py::arg("snr"));

  m.def("allocate", [](std::vector<double> taus, std::vector<double> weights, double horizon) {
    AllocationProblem p{std::move(taus), std::move(weights), horizon};
    if (p.weights.empty()) p.weights.assign(p.taus_ms.size(), 1.0);
    return allocation_dict(allocate(p));
  }, py::arg("taus_ms"), py::arg("weights") = std::vector<double>{}, py::arg("horizon_ms"));
  m.def("closed_form_allocate", [](std::vector<double> taus, std::vector<double> weights, double horizon) -> py::object {
    AllocationProblem p{std::move(taus), std::move(weights), horizon};
    if (p.weights.empty()) p.weights.assign(p.taus_ms.size(), 1.0);
    auto a = closed_form_allocate(p);
    return a ? py::object(allocation_dict(*a)) : py::none();
  }, py::arg("taus_ms"), py::arg("weights") = std::vector<double>{}, py::arg("horizon_ms"));

  m.def("solve_gamma_s", &solve_gamma_s, py::arg("exponent"));
  m.def("union_probability", [](const std::vector<double>& p) { return union_probability(p); }, py::arg("probabilities"));
  m.def("calibrate_scale", &calibrate_scale, py::arg("duration_ms"), py::arg("probability"), py::arg("distance_km"));

  m.def("plan_fleet", [](const std::vector<std::vector<double>>& distances_km, double scale, double horizon,
                         const std::string& rule3) {
    ScenarioFile sc;
    sc.name = "python";
    sc.mode = ScenarioMode::Fleet;
    sc.horizon_ms = horizon;
    sc.scale_ms_per_km4 = scale;
    const Matrix d = list_to_matrix(distances_km);
    sc.fleet = FleetSpec{FleetScenario::from_distances(d, scale, horizon), d, PlannerOptions{parse_rule3(rule3)}};
    return report_dict(run(sc));
  }, py::arg("distances_km"), py::arg("scale_ms_per_km4"), py::arg("horizon_ms"), py::arg("rule3") = "per-sensor");

  m.def("run_scenario", [](const std::filesystem::path& path) { return report_dict(run(parse_scenario(path))); },
        py::arg("path"));
  m.def("run_scenario_text", [](const std::string& text) { return report_dict(run(parse_scenario_text(text))); },
        py::arg("text"));
  m.def("format_table", [](const std::filesystem::path& path) { return format_table(run(parse_scenario(path))); },
        py::arg("path"));
  m.def("format_csv", [](const std::filesystem::path& path) { return format_csv(run(parse_scenario(path))); },
        py::arg("path"));
}
