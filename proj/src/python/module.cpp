#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tewa/baseline.hpp"
#include "tewa/engine.hpp"
#include "tewa/errors.hpp"
#include "tewa/geometry.hpp"
#include "tewa/protocol.hpp"
#include "tewa/scenario.hpp"
#include "tewa/threat_eval.hpp"
#include "tewa/trace.hpp"

namespace py = pybind11;
using namespace tewa;

namespace {

std::string run_json(const std::string& path, std::optional<std::uint64_t> seed) {
  const auto spec = load_scenario_file(path);
  const auto run = run_scenario(spec, seed);
  nlohmann::json out = {{"trace", write_trace(run.trace)},
                        {"metrics", run.metrics.to_json()},
                        {"max_decide_ms", run.stats.max_decide_ms},
                        {"violations", run.stats.violations}};
  out["first_mode"] = run.stats.first_decided_mode
                          ? nlohmann::json(std::string(to_string(*run.stats.first_decided_mode)))
                          : nlohmann::json();
  return out.dump();
}

std::string describe_json(const std::string& path) {
  const auto spec = load_scenario_file(path);
  return nlohmann::json{{"name", spec.name},
                        {"das", spec.das.size()},
                        {"weapons", spec.weapons.size()},
                        {"threats", spec.threats.size()},
                        {"dt", spec.dt},
                        {"max_time", spec.max_time},
                        {"seed", spec.seed},
                        {"hash", scenario_hash(spec)}}
      .dump();
}

std::string replay_metrics_json(const std::string& trace_text, const std::string& path) {
  return metrics_from_trace(read_trace(trace_text), load_scenario_file(path)).to_json().dump();
}

std::vector<std::tuple<double, double, double>> circle_line_poi(double cx, double cy, double r,
                                                                double ox, double oy, double dx,
                                                                double dy) {
  std::vector<std::tuple<double, double, double>> out;
  for (const auto& hit : geometry::circle_line_poi({{cx, cy}, r}, geometry::Ray::through({ox, oy}, {dx, dy}))) {
    out.emplace_back(hit.t, hit.point.x, hit.point.y);
  }
  return out;
}

std::optional<std::tuple<double, double, double>> solve_intercept(double tx, double ty, double vx,
                                                                  double vy, double sx, double sy,
                                                                  double speed) {
  const auto s = geometry::solve_intercept({tx, ty}, {vx, vy}, {sx, sy}, speed);
  if (!s) return std::nullopt;
  return std::make_tuple(s->time_of_flight, s->impact_point.x, s->impact_point.y);
}

double kill_probability_py(const std::vector<std::tuple<double, double, double, double, int>>& terms,
                           double w_intent, double w_capability, double w_load) {
  std::vector<KillProbabilityTerm> t;
  for (const auto& [ii, ci, load, c, shots] : terms) t.push_back({ii, ci, load, c, shots});
  return kill_probability(t, {w_intent, w_capability, w_load});
}

std::vector<std::optional<std::size_t>> deferred_acceptance_py(
    const std::vector<std::vector<double>>& weight, const std::vector<std::vector<bool>>& feasible,
    const std::vector<int>& capacity) {
  const std::size_t n = weight.size();
  const std::size_t m = capacity.size();
  MatchingProblem p(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (weight[i].size() != m || feasible.at(i).size() != m) {
      throw std::invalid_argument("weight and feasible rows must have one entry per acceptor");
    }
    for (std::size_t a = 0; a < m; ++a) {
      p.weight_at(i, a) = weight[i][a];
      p.set_feasible(i, a, feasible[i][a]);
    }
  }
  p.capacity = capacity;
  return deferred_acceptance(p).match;
}

std::string select_mode_py(std::size_t alive, std::size_t up) {
  return std::string(to_string(select_mode(alive, up, WeightsConfig{})));
}

class Session {
 public:
  Session(const std::string& deployment_path, std::optional<std::uint64_t> seed)
      : session_(load_scenario_file(deployment_path), seed) {}

  std::vector<std::string> handle_line(const std::string& line) { return session_.handle_line(line); }
  bool closed() const { return session_.closed(); }
  std::int64_t tick() const { return session_.state().tick; }
  std::string trace() const { return write_trace(session_.trace()); }

 private:
  ProtocolSession session_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-stage threat evaluation and weapon assignment engine";

  py::register_exception<Error>(m, "TewaError");
  py::register_exception<ParseError>(m, "ParseError", m.attr("TewaError"));
  py::register_exception<ValidationError>(m, "ValidationError", m.attr("TewaError"));
  py::register_exception<ScenarioInvalid>(m, "ScenarioInvalid", m.attr("TewaError"));
  py::register_exception<CorruptTrace>(m, "CorruptTrace", m.attr("TewaError"));
  py::register_exception<VersionMismatch>(m, "VersionMismatch", m.attr("TewaError"));

  m.def("describe_scenario_json", &describe_json, py::arg("path"));
  m.def("run_scenario_json", &run_json, py::arg("path"), py::arg("seed") = std::nullopt,
        py::call_guard<py::gil_scoped_release>());
  m.def("replay_metrics_json", &replay_metrics_json, py::arg("trace"), py::arg("path"));
  m.def("circle_line_poi", &circle_line_poi, py::arg("cx"), py::arg("cy"), py::arg("r"), py::arg("ox"),
        py::arg("oy"), py::arg("dx"), py::arg("dy"));
  m.def("solve_intercept", &solve_intercept, py::arg("tx"), py::arg("ty"), py::arg("vx"), py::arg("vy"),
        py::arg("sx"), py::arg("sy"), py::arg("speed"));
  m.def("kill_probability", &kill_probability_py, py::arg("terms"), py::arg("w_intent") = 0.4,
        py::arg("w_capability") = 0.4, py::arg("w_load") = 0.2);
  m.def("deferred_acceptance", &deferred_acceptance_py, py::arg("weight"), py::arg("feasible"),
        py::arg("capacity"));
  m.def("select_mode", &select_mode_py, py::arg("alive_threats"), py::arg("up_weapons"));
  m.def("fnv1a_hex", &fnv1a_hex, py::arg("data"));

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&, std::optional<std::uint64_t>>(), py::arg("deployment"),
           py::arg("seed") = std::nullopt)
      .def("handle_line", &Session::handle_line, py::arg("line"))
      .def_property_readonly("closed", &Session::closed)
      .def_property_readonly("tick", &Session::tick)
      .def("trace", &Session::trace);
}
