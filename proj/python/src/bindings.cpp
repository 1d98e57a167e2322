#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qq/errors.hpp"
#include "qq/normtest.hpp"
#include "qq/probability.hpp"
#include "qq/qqfit.hpp"
#include "qq/scores.hpp"
#include "qq/shapefit.hpp"
#include "qq/simharness.hpp"

namespace py = pybind11;
using namespace qq;

namespace {

// nlohmann::json -> Python objects via the json module keeps the binding free
// of a hand-written converter.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Sample make_sample(std::vector<double> values, std::size_t censored,
                   std::optional<double> detection_limit) {
  if (censored == 0 && !detection_limit) return Sample::complete(std::move(values));
  return Sample::left_censored(std::move(values), censored, detection_limit);
}

std::vector<double> to_vector(const ScoreVector& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "QQ-plot estimation, shape fitting and normality testing";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_ValueError);
  py::register_exception<CalibrationRangeError>(m, "CalibrationRangeError", PyExc_ValueError);
  py::register_exception<sim::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
  m.def("std_normal_inv_cdf", py::overload_cast<double>(&std_normal_inv_cdf), py::arg("p"));
  m.def("student_t_cdf", &student_t_cdf, py::arg("t"), py::arg("nu"));
  m.def("student_t_inv_cdf", [](double p, double nu) { return student_t_inv_cdf(p, nu); },
        py::arg("p"), py::arg("nu"));
  m.def("incomplete_beta", py::overload_cast<double, double, double>(&incomplete_beta),
        py::arg("a"), py::arg("b"), py::arg("x"));

  m.def(
      "normal_scores",
      [](std::size_t n, double alpha) {
        return to_vector(normal_scores(n, PlottingPosition::symmetric(alpha)));
      },
      py::arg("n"), py::arg("alpha") = 0.5,
      "Phi^-1((i - alpha) / (n + 1 - 2 alpha)) for i = 1..n");
  m.def("t_scores", [](std::size_t n, double nu) { return to_vector(t_scores(n, nu)); },
        py::arg("n"), py::arg("nu"));

  py::class_<Sample>(m, "Sample")
      .def(py::init(&make_sample), py::arg("values"), py::arg("censored") = 0,
           py::arg("detection_limit") = py::none(),
           "Observed values plus a count of left-censored values below the detection limit")
      .def_readonly("values", &Sample::values)
      .def_readonly("n_total", &Sample::n_total)
      .def_readonly("k_censored", &Sample::k_censored)
      .def_readonly("detection_limit", &Sample::detection_limit)
      .def_property_readonly("censored_fraction", &Sample::censored_fraction)
      .def("__len__", [](const Sample& s) { return s.n_total; });

  py::enum_<FitKind>(m, "FitKind")
      .value("full", FitKind::full)
      .value("censored", FitKind::censored)
      .value("winsorized", FitKind::winsorized);

  py::class_<QQFit>(m, "QQFit")
      .def_readonly("kind", &QQFit::kind)
      .def_readonly("m", &QQFit::intercept)
      .def_readonly("s", &QQFit::slope)
      .def_readonly("r", &QQFit::r)
      .def_readonly("n_total", &QQFit::n_total)
      .def_readonly("k_censored", &QQFit::k_censored)
      .def_readonly("w_winsorized", &QQFit::w_winsorized)
      .def_readonly("n_eff_mean", &QQFit::n_eff_mean)
      .def_readonly("n_eff_sd", &QQFit::n_eff_sd)
      .def_readonly("n_eff_limit", &QQFit::n_eff_limit)
      .def_readonly("se_mean", &QQFit::se_mean)
      .def_readonly("se_sd", &QQFit::se_sd)
      .def_readonly("se_upper_limit", &QQFit::se_upper_limit)
      .def_readonly("warnings", &QQFit::warnings)
      .def("__repr__", [](const QQFit& f) {
        return "QQFit(m=" + std::to_string(f.intercept) + ", s=" + std::to_string(f.slope) +
               ", r=" + std::to_string(f.r) + ")";
      });

  py::class_<ReferenceInterval>(m, "ReferenceInterval")
      .def_readonly("lower", &ReferenceInterval::lower)
      .def_readonly("upper", &ReferenceInterval::upper)
      .def_readonly("coverage", &ReferenceInterval::coverage)
      .def_readonly("z", &ReferenceInterval::z_multiplier)
      .def_readonly("se_upper", &ReferenceInterval::se_upper)
      .def_readonly("se_lower", &ReferenceInterval::se_lower);

  m.def("fit_full", &fit_full, py::arg("sample"));
  m.def("fit_censored", &fit_censored, py::arg("sample"));
  m.def("fit_winsorized", &fit_winsorized, py::arg("sample"), py::arg("w"));
  m.def("reference_interval", &reference_interval, py::arg("fit"), py::arg("coverage") = 0.95,
        py::arg("z") = py::none());

  m.def("boxcox_transform",
        [](const std::vector<double>& x, double lambda) { return boxcox_transform(x, lambda); },
        py::arg("x"), py::arg("lambda_"));

  py::class_<BoxCoxFit>(m, "BoxCoxFit")
      .def_readonly("lambda_hat", &BoxCoxFit::lambda_hat)
      .def_readonly("qqr_at_opt", &BoxCoxFit::qqr_at_opt)
      .def_readonly("objective_at_opt", &BoxCoxFit::objective_at_opt)
      .def_readonly("fit_at_opt", &BoxCoxFit::fit_at_opt)
      .def_readonly("no_preference", &BoxCoxFit::no_preference)
      .def_property_readonly("search_trace", [](const BoxCoxFit& f) {
        std::vector<std::pair<double, double>> t;
        for (const auto& p : f.search_trace) t.emplace_back(p.parameter, p.objective);
        return t;
      });

  m.def(
      "fit_boxcox",
      [](const Sample& s, const std::string& method, std::pair<double, double> range,
         std::size_t winsor) {
        BoxCoxOptions o;
        o.lambda_range = {range.first, range.second};
        o.winsor = winsor;
        if (method == "qqr") return fit_boxcox_qqr(s, o);
        if (method == "pl") return fit_boxcox_pl(s, o);
        throw py::value_error("method must be 'qqr' or 'pl'");
      },
      py::arg("sample"), py::arg("method") = "qqr",
      py::arg("range") = std::make_pair(-3.0, 3.0), py::arg("winsor") = 0);

  py::class_<TFit>(m, "TFit")
      .def_readonly("nu_hat", &TFit::nu_hat)
      .def_readonly("qqr_at_opt", &TFit::qqr_at_opt)
      .def_readonly("mu_hat", &TFit::mu_hat)
      .def_readonly("sigma_hat", &TFit::sigma_hat)
      .def_readonly("upper_limit", &TFit::upper_limit)
      .def_readonly("lower_limit", &TFit::lower_limit);

  m.def(
      "fit_t",
      [](const Sample& s, std::pair<double, double> range, bool integer_nu, double coverage) {
        TFitOptions o;
        o.nu_range = {range.first, range.second};
        o.integer_only = integer_nu;
        o.coverage = coverage;
        return fit_t_nu(s, o);
      },
      py::arg("sample"), py::arg("range") = std::make_pair(1.0, 200.0),
      py::arg("integer_nu") = false, py::arg("coverage") = 0.95);

  py::class_<NormalityTest>(m, "NormalityTest")
      .def_property_readonly("variant",
                             [](const NormalityTest& t) { return std::string(to_string(t.variant)); })
      .def_readonly("r", &NormalityTest::r)
      .def_readonly("y", &NormalityTest::y)
      .def_readonly("z", &NormalityTest::z)
      .def_readonly("p", &NormalityTest::p)
      .def_readonly("reject", &NormalityTest::reject)
      .def_readonly("lambda_", &NormalityTest::lambda)
      .def_readonly("calibration_warning", &NormalityTest::calibration_warning);

  m.def(
      "test_normality",
      [](const Sample& s, const std::string& variant, double alpha) {
        return test_normality(s, parse_test_variant(variant), alpha);
      },
      py::arg("sample"), py::arg("variant") = "full", py::arg("alpha") = 0.05);
  m.def("z_transform", &z_transform, py::arg("r"));
  m.def("z_transform_inverse", &z_transform_inverse, py::arg("y"));

  m.def(
      "run_study",
      [](const py::dict& config) {
        const sim::StudyConfig c = sim::config_from_json(from_python(config));
        sim::StudyReport r;
        {
          py::gil_scoped_release release;
          r = sim::run_study(c);
        }
        return to_python(sim::to_json(r, true));
      },
      py::arg("config"),
      "Runs a simulation study from a config dict such as {'study': 'B-efficiency'}");
}
