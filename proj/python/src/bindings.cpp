#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ipdyn/analysis.hpp"
#include "ipdyn/calibration.hpp"
#include "ipdyn/errors.hpp"
#include "ipdyn/integrator.hpp"
#include "ipdyn/model.hpp"
#include "ipdyn/policy.hpp"

namespace py = pybind11;
using namespace ipdyn;

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Infringement dynamics dN/dt = (1 - N/n_max)(alpha - b N).

        Closed-form and RK4 solutions, regime classification, comparative
        statics, least-squares calibration and protection-schedule
        optimization.
    )pbdoc";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double alpha, double b, double n_max, double n0) {
                 ModelParams p{alpha, b, n_max, n0};
                 p.validate();
                 return p;
             }),
             py::arg("alpha"), py::arg("b"), py::arg("n_max"), py::arg("n0") = 0.0)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("b", &ModelParams::b)
        .def_readwrite("n_max", &ModelParams::n_max)
        .def_readwrite("n0", &ModelParams::n0)
        .def("validate", &ModelParams::validate)
        .def("__repr__", [](const ModelParams& p) { return "ModelParams(" + p.describe() + ")"; });

    py::enum_<RegimeKind>(m, "RegimeKind")
        .value("Saturation", RegimeKind::Saturation)
        .value("Controlled", RegimeKind::Controlled)
        .value("Critical", RegimeKind::Critical);

    py::class_<Regime>(m, "Regime")
        .def_readonly("kind", &Regime::kind)
        .def_readonly("limit", &Regime::limit)
        .def_readonly("lambda_", &Regime::lambda)
        .def_readonly("stationary", &Regime::stationary);

    py::class_<Equilibrium>(m, "Equilibrium")
        .def_readonly("value", &Equilibrium::value)
        .def_property_readonly("stability", [](const Equilibrium& e) { return std::string(to_string(e.stability)); });

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times", &Trajectory::times)
        .def_property_readonly("values", &Trajectory::values)
        .def("__len__", &Trajectory::size);

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def(py::init([](double step, double rel_tol, double abs_tol, std::size_t max_steps) {
                 return IntegratorConfig{step, rel_tol, abs_tol, max_steps};
             }),
             py::arg("step") = 1e-3, py::arg("rel_tol") = 1e-8, py::arg("abs_tol") = 1e-10,
             py::arg("max_steps") = 10'000'000)
        .def_readwrite("step", &IntegratorConfig::step)
        .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
        .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
        .def_readwrite("max_steps", &IntegratorConfig::max_steps);

    m.def("rhs", &rhs, py::arg("params"), py::arg("n"));
    m.def("equilibria", &equilibria, py::arg("params"), py::arg("tol_crit") = kDefaultTolCrit);
    m.def("classify_regime", &classify_regime, py::arg("params"), py::arg("tol_crit") = kDefaultTolCrit);
    m.def("closed_form", &closed_form, py::arg("params"), py::arg("t"), py::arg("tol_crit") = kDefaultTolCrit);
    m.def("settling_time", &settling_time, py::arg("params"), py::arg("fraction"),
          py::arg("tol_crit") = kDefaultTolCrit, "Returns None when the target is never reached.");

    m.def("step_rk4", &step_rk4, py::arg("params"), py::arg("n"), py::arg("h"));
    m.def("integrate", &integrate, py::arg("params"), py::arg("t_end"), py::arg("cfg") = IntegratorConfig{});
    m.def("integrate_adaptive", &integrate_adaptive, py::arg("params"), py::arg("t_end"),
          py::arg("cfg") = IntegratorConfig{});
    m.def(
        "first_passage",
        [](const ModelParams& p, double level, const IntegratorConfig& cfg, double t_max) -> py::object {
            const PassageResult r = first_passage(p, level, cfg, t_max);
            if (r.reached()) return py::float_(r.time);
            return py::str(r.reason);
        },
        py::arg("params"), py::arg("level"), py::arg("cfg") = IntegratorConfig{}, py::arg("t_max") = 1e3,
        "Passage time, or a string explaining why the level is not reached.");

    m.def(
        "compare_levels",
        [](const ModelParams& base, const std::vector<double>& b_values, const std::vector<double>& t_grid) {
            return compare_levels(base, b_values, t_grid).values;
        },
        py::arg("base"), py::arg("b_values"), py::arg("t_grid"));
    m.def(
        "sensitivity",
        [](const ModelParams& p, double t, const std::string& target, double eps) {
            const Sensitivity s = sensitivity(p, t, parse_sensitivity_target(target), eps);
            return py::dict(py::arg("derivative") = s.derivative, py::arg("bump") = s.bump,
                            py::arg("one_sided") = s.one_sided, py::arg("branch_crossing") = s.branch_crossing);
        },
        py::arg("params"), py::arg("t"), py::arg("target"), py::arg("eps") = 1e-5);
    m.def(
        "simulate_stochastic",
        [](const ModelParams& p, const std::vector<double>& t_grid, std::size_t runs, std::uint64_t seed) {
            const StochasticSummary s = simulate_stochastic(p, t_grid, runs, seed);
            return py::make_tuple(s.mean, s.stderr_mean);
        },
        py::arg("params"), py::arg("t_grid"), py::arg("runs"), py::arg("seed"));

    m.def(
        "synth",
        [](const ModelParams& p, const std::vector<double>& t_grid, double noise_sigma, std::uint64_t seed) {
            return synth(p, t_grid, noise_sigma, seed).values();
        },
        py::arg("params"), py::arg("t_grid"), py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
    m.def(
        "fit",
        [](const std::vector<double>& times, const std::vector<double>& values, std::size_t starts,
           std::uint64_t seed) {
            const FitResult r = fit(times, values, default_bounds(values), FitOptions{starts, seed});
            return py::dict(py::arg("params") = r.params, py::arg("rss") = r.rss, py::arg("n_evals") = r.n_evals,
                            py::arg("converged") = r.converged, py::arg("low_confidence") = r.low_confidence,
                            py::arg("degenerate") = r.degenerate);
        },
        py::arg("times"), py::arg("values"), py::arg("starts") = 16, py::arg("seed") = 0,
        "Least-squares calibration with the default bounds.");

    m.def(
        "cost",
        [](const ModelParams& base, const std::vector<double>& levels, double c_protect, double c_infringe,
           double horizon) {
            return cost(base, PolicySchedule::uniform(horizon, levels), CostSpec{c_protect, c_infringe, horizon});
        },
        py::arg("base"), py::arg("levels"), py::arg("c_protect"), py::arg("c_infringe"), py::arg("horizon"));
    m.def(
        "optimize_static",
        [](const ModelParams& base, double c_protect, double c_infringe, double horizon, double b_lo, double b_hi,
           std::size_t grid_points) {
            const StaticOptimum s =
                optimize_static(base, CostSpec{c_protect, c_infringe, horizon}, Interval{b_lo, b_hi}, grid_points);
            return py::make_tuple(s.level, s.cost);
        },
        py::arg("base"), py::arg("c_protect"), py::arg("c_infringe"), py::arg("horizon"), py::arg("b_lo"),
        py::arg("b_hi"), py::arg("grid_points") = 41);
    m.def(
        "optimize_schedule",
        [](const ModelParams& base, double c_protect, double c_infringe, double horizon, std::size_t segments,
           double b_lo, double b_hi, std::uint64_t seed) {
            const ScheduleOptimum s = optimize_schedule(base, CostSpec{c_protect, c_infringe, horizon}, segments,
                                                        Interval{b_lo, b_hi}, seed);
            return py::make_tuple(s.schedule.breakpoints, s.schedule.levels, s.cost);
        },
        py::arg("base"), py::arg("c_protect"), py::arg("c_infringe"), py::arg("horizon"), py::arg("segments"),
        py::arg("b_lo"), py::arg("b_hi"), py::arg("seed") = 0);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
