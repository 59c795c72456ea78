#include "trigs/config.hpp"
#include "trigs/harness.hpp"
#include "trigs/lyapunov.hpp"
#include "trigs/report.hpp"
#include "trigs/selfcheck.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace trigs;

namespace {

ExperimentConfig config_from(const py::dict& settings) {
    ExperimentConfig cfg;
    for (const auto& [k, v] : settings) {
        const std::string key = py::str(k);
        std::string text;
        if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
            for (const auto& item : v) text += (text.empty() ? "" : ",") + std::string(py::str(item));
        } else if (py::isinstance<py::float_>(v)) {
            text = format_double(v.cast<double>());
        } else {
            text = py::str(v);
        }
        apply_setting(cfg, key, text);
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_trigs, m) {
    m.doc() = "Tikhonov-regularized inertial gradient dynamics";

    // Later registrations are tried first, so the subclass goes last.
    auto& base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::class_<ObjectiveFunction>(m, "Objective")
        .def_property_readonly("name", &ObjectiveFunction::name)
        .def_property_readonly("dimension", &ObjectiveFunction::dimension)
        .def_property_readonly("is_smooth", &ObjectiveFunction::is_smooth)
        .def_property_readonly("has_prox", &ObjectiveFunction::has_prox)
        .def_property_readonly("min_value", &ObjectiveFunction::known_min_value)
        .def_property_readonly("min_norm_solution", &ObjectiveFunction::known_min_norm_solution)
        .def("value", &ObjectiveFunction::value)
        .def("gradient", &ObjectiveFunction::gradient)
        .def("prox", &ObjectiveFunction::prox, py::arg("theta"), py::arg("x"));

    m.def("make_problem", &make_problem, py::arg("id"));
    m.def("moreau_objective", &moreau_objective, py::arg("objective"), py::arg("theta"));

    m.def(
        "viscosity_point",
        [](const ObjectiveFunction& f, double eps, double tol, bool force_iterative) {
            InnerSolveOptions o;
            o.tol = tol;
            o.force_iterative = force_iterative;
            const ViscosityPoint p = solve_viscosity_point(f, eps, o);
            return py::make_tuple(p.point, p.residual, p.inner_iterations);
        },
        py::arg("objective"), py::arg("eps"), py::arg("tol") = 1e-10,
        py::arg("force_iterative") = false,
        "x_eps with its residual |grad f + eps x| and inner iteration count");

    m.def(
        "moreau",
        [](const ObjectiveFunction& f, double theta, const Vec& x) {
            const MoreauEvaluation e = moreau(f, theta, x);
            return py::make_tuple(e.envelope_value, e.prox_point, e.envelope_gradient);
        },
        py::arg("objective"), py::arg("theta"), py::arg("x"),
        "(envelope value, prox point, envelope gradient)");

    m.def(
        "admissible_lambda_interval",
        [](double delta, double a, double c) -> std::optional<std::pair<double, double>> {
            const auto iv = admissible_lambda_interval(delta, a, c);
            if (!iv) return std::nullopt;
            return std::make_pair(iv->lower, iv->upper);
        },
        py::arg("delta"), py::arg("a"), py::arg("c"));

    m.def(
        "decay_onset",
        [](double c0, double p, double delta, double lambda, double a, double c, double t_start,
           double t_max) -> std::optional<double> {
            const LyapunovParams lp{delta, lambda, a, c};
            const DecayCheck h = check_H1(RegularizationSchedule::power_law(c0, p, t_start), lp, t_max);
            if (!h.satisfied) return std::nullopt;
            return h.t1;
        },
        py::arg("c0"), py::arg("p"), py::arg("delta") = 1.0, py::arg("lambda_") = 0.6,
        py::arg("a") = 2.0, py::arg("c") = 10.0, py::arg("t_start") = 1.0, py::arg("t_max") = 1e12,
        "t1 of the decay condition for eps = c0 / t^p, or None");

    m.def(
        "heavy_ball_rate",
        [](double mu, double t_end) { return heavy_ball_rate_probe(mu, 0.0, t_end).fit.rate; },
        py::arg("mu"), py::arg("t_end") = 20.0);

    py::class_<RunResult>(m, "RunResult")
        .def_property_readonly("times", &RunResult::times)
        .def("series", &RunResult::series, py::arg("quantity"))
        .def_property_readonly("all_pass", &RunResult::all_inequalities_pass)
        .def_property_readonly("summary_json", [](const RunResult& r) { return summary_json(r).dump(); })
        .def_property_readonly("rates_json", [](const RunResult& r) { return rates_json(r).dump(); })
        .def("write", [](const RunResult& r, const std::string& dir) { write_run_outputs(dir, r); },
             py::arg("directory"));

    m.def(
        "run_experiment",
        [](const py::dict& settings) {
            const ExperimentConfig cfg = config_from(settings);
            py::gil_scoped_release release;
            return run_experiment(cfg);
        },
        py::arg("settings") = py::dict(),
        "Settings use the config-file keys, e.g. {'p': 0.5, 't-end': 1e3}.");

    m.def(
        "tradeoff_sweep",
        [](const std::vector<double>& ps, const py::dict& settings) {
            const ExperimentConfig cfg = config_from(settings);
            std::vector<TradeoffRow> rows;
            {
                py::gil_scoped_release release;
                rows = tradeoff_sweep(ps, cfg);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["p"] = r.p;
                d["value_target"] = r.value_target;
                d["trajectory_target"] = r.trajectory_target;
                d["value_slope"] = r.value_slope;
                d["trajectory_slope"] = r.trajectory_slope;
                d["value_bounded"] = r.value_bounded;
                d["trajectory_bounded"] = r.trajectory_bounded;
                d["inequalities_pass"] = r.inequalities_pass;
                d["error"] = r.error;
                out.append(d);
            }
            return out;
        },
        py::arg("ps"), py::arg("settings") = py::dict());

    m.def("self_checks", [](std::optional<double> rel_tol) {
        py::list out;
        for (const auto& c : run_self_checks(rel_tol))
            out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    }, py::arg("rel_tol") = py::none());
}
