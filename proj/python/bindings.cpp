#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbh/engine.hpp"
#include "sbh/harnack.hpp"
#include "sbh/hausdorff.hpp"
#include "sbh/kernel.hpp"
#include "sbh/scenario.hpp"

namespace py = pybind11;
using namespace sbh;

namespace {

Point to_point(const std::vector<double>& v) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) throw py::value_error("point dimension out of range");
  Point p(Dimension{static_cast<int>(v.size())});
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

std::string suite_json(std::vector<Scenario> corpus, std::uint64_t seed) {
  EngineOptions opts;
  opts.seed = seed;
  return reports_to_json(run_suite(corpus, opts));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lower bounds for subharmonic functions: native core";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);

  m.def("kernel_k", [](int d, double t) { return kernel_k(Dimension{d}, t).value(); }, py::arg("d"), py::arg("t"),
        "Kernel k_d(t); -inf at t = 0 for d >= 2.");
  m.def("sphere_area", [](int d) { return sphere_area(Dimension{d}); }, py::arg("d"));
  m.def(
      "center_distance_formula", [](int d, double r, double rho) { return center_distance_formula(Dimension{d}, r, rho); },
      py::arg("d"), py::arg("r"), py::arg("rho"));
  m.def(
      "ball_pair_distance",
      [](const std::vector<double>& center, double radius, const std::vector<double>& x, const std::vector<double>& y) {
        return ball_pair_distance(Ball(to_point(center), radius), to_point(x), to_point(y)).value;
      },
      py::arg("center"), py::arg("radius"), py::arg("x"), py::arg("y"), "Exact Harnack distance in a ball.");
  m.def(
      "content_upper_bound",
      [](const std::vector<std::vector<double>>& points, double p, double B, double r) {
        std::vector<Point> S;
        for (const auto& v : points) S.push_back(to_point(v));
        return content_upper_bound(S, Gauge::power(p, B), r).total_gauge;
      },
      py::arg("points"), py::arg("p"), py::arg("B") = 1.0, py::arg("r"),
      "Upper bound for the h-content of radius r with h(t) = B c_p t^p.");
  m.def(
      "run_scenario_json",
      [](const std::string& text, std::uint64_t seed) {
        std::vector<Scenario> corpus{parse_scenario(text)};
        py::gil_scoped_release release;
        return suite_json(std::move(corpus), seed);
      },
      py::arg("text"), py::arg("seed") = 0, "Run one scenario given as JSON text; returns the JSON report.");
  m.def(
      "verify_files_json",
      [](const std::vector<std::string>& paths, std::uint64_t seed) {
        std::vector<Scenario> corpus;
        for (const std::string& p : paths) corpus.push_back(load_scenario(p));
        py::gil_scoped_release release;
        return suite_json(std::move(corpus), seed);
      },
      py::arg("paths"), py::arg("seed") = 0);
  m.attr("__version__") = SBH_VERSION;
}
