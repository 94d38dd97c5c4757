#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "switchosc/core.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/experiments.hpp"
#include "switchosc/layer_integrator.hpp"
#include "switchosc/output.hpp"
#include "switchosc/poincare.hpp"
#include "switchosc/regularization.hpp"
#include "switchosc/sliding.hpp"

namespace py = pybind11;
using namespace switchosc;

namespace {

Side side_of(const std::string& s) {
    if (s == "+" || s == "plus") return Side::Plus;
    if (s == "-" || s == "minus") return Side::Minus;
    throw DomainError("side must be '+' or '-'");
}

py::dict trajectory_dict(const Trajectory& t) {
    py::list x, y, mode, branch, event;
    for (const auto& r : trajectory_rows(t)) {
        x.append(r.x);
        y.append(r.y);
        mode.append(r.mode);
        branch.append(r.branch);
        event.append(r.event);
    }
    py::list events;
    for (const auto& e : t.events()) events.append(py::make_tuple(e.x, std::string(to_string(e.kind)), e.branch));
    py::dict d;
    d["x"] = x;
    d["y_or_v"] = y;
    d["mode"] = mode;
    d["branch"] = branch;
    d["event"] = event;
    d["events"] = events;
    d["layer_scaled"] = t.layer_scaled();
    return d;
}

Trajectory simulate(const std::string& model, double a, double x0, double y0, double x_end, double epsilon,
                    const std::string& mode) {
    const auto m = parse_model(model);
    if (epsilon > 0.0) {
        return integrate_layer(m, OscillatorParams::regularized(a, epsilon), {x0, y0 / epsilon}, x_end).trajectory;
    }
    HybridState s{x0, y0, y0 >= 0.0 ? Mode::FlowPlus : Mode::FlowMinus, -1};
    if (mode == "flow+") s.mode = Mode::FlowPlus;
    else if (mode == "flow-") s.mode = Mode::FlowMinus;
    else if (mode == "sliding") s.mode = Mode::Sliding;
    else if (!mode.empty()) throw DomainError("mode must be flow+, flow- or sliding");
    else if (y0 == 0.0) throw DomainError("y0 = 0 needs a mode");
    return simulate_discontinuous(m, OscillatorParams::discontinuous(a), s, x_end);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "switched-frequency oscillator core";

    py::register_exception<NoRootError>(m, "NoRootError", PyExc_RuntimeError);
    py::register_exception<CapturedError>(m, "CapturedError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("forcing", [](const std::string& model, double x, double lam) { return forcing(parse_model(model), x, lam); },
          py::arg("model"), py::arg("x"), py::arg("lam"));
    m.def("solve_x0", &solve_x0);
    m.def("composite_map", py::overload_cast<double, double>(&composite_map), py::arg("x"), py::arg("a"));
    m.def("next_crossing",
          [](const std::string& side, double x, double a) {
              return next_crossing(side_of(side), x, OscillatorParams::discontinuous(a)).x_next;
          },
          py::arg("side"), py::arg("x"), py::arg("a"));
    m.def("find_nonsliding_period4",
          [](double a) {
              const auto o = find_nonsliding_period4(a);
              py::dict d;
              d["x_star"] = o.x_star;
              d["multiplier"] = o.multiplier;
              d["residual"] = o.residual;
              d["stable"] = o.stable;
              return d;
          },
          py::arg("a"));
    m.def("find_sliding_period4_linear",
          [](double a) {
              const auto o = find_sliding_period4_linear(a);
              py::dict d;
              d["x1"] = o.x1;
              d["x2"] = o.x2;
              d["x3"] = o.x3;
              d["closure_error"] = o.closure_error;
              return d;
          },
          py::arg("a"));
    m.def("find_sliding_period4_nonlinear",
          [](double a, int periods) {
              const auto o = find_sliding_period4_nonlinear(a, periods);
              py::dict d;
              d["x_a"] = o.x_a;
              d["closure_error"] = o.closure_error;
              return d;
          },
          py::arg("a"), py::arg("periods") = 1);
    m.def("branches",
          [](const std::string& model, double lo, double hi) {
              py::list out;
              for (const auto& b : branches(parse_model(model), lo, hi))
                  out.append(py::make_tuple(b.n, b.lo, b.hi, std::string(to_string(b.stability()))));
              return out;
          },
          py::arg("model"), py::arg("lo"), py::arg("hi"));
    m.def("simulate",
          [](const std::string& model, double a, double x0, double y0, double x_end, double epsilon,
             const std::string& mode) { return trajectory_dict(simulate(model, a, x0, y0, x_end, epsilon, mode)); },
          py::arg("model"), py::arg("a"), py::arg("x0"), py::arg("y0"), py::arg("x_end"), py::arg("epsilon") = 0.0,
          py::arg("mode") = "");
    m.def("simulate_csv",
          [](const std::string& model, double a, double x0, double y0, double x_end, double epsilon,
             const std::string& mode) { return trajectory_csv(simulate(model, a, x0, y0, x_end, epsilon, mode)); },
          py::arg("model"), py::arg("a"), py::arg("x0"), py::arg("y0"), py::arg("x_end"), py::arg("epsilon") = 0.0,
          py::arg("mode") = "");
    m.def("fold_point",
          [](const std::string& side, int n, double a, double eps) {
              return fold_point(side_of(side), n, OscillatorParams::regularized(a, eps));
          },
          py::arg("side"), py::arg("n"), py::arg("a"), py::arg("epsilon"));
    m.def("regularized_poincare_linear",
          [](double x, double a, double eps) { return regularized_poincare_linear(x, OscillatorParams::regularized(a, eps)); },
          py::arg("x"), py::arg("a"), py::arg("epsilon"));
    m.def("find_regularized_nonsliding_linear",
          [](double a, double eps) {
              const auto r = find_regularized_nonsliding_linear(OscillatorParams::regularized(a, eps));
              py::dict d;
              d["x_star"] = r.x_star;
              d["derivative"] = r.derivative;
              d["residual"] = r.residual;
              return d;
          },
          py::arg("a"), py::arg("epsilon"));
    m.def("measure_exit_point",
          [](int n, double a, double eps) {
              const auto r = measure_exit_point(n, OscillatorParams::regularized(a, eps));
              py::dict d;
              d["x_e"] = r.x_e;
              d["x_fold"] = r.x_fold;
              d["deviation"] = r.deviation;
              return d;
          },
          py::arg("n"), py::arg("a"), py::arg("epsilon"));
    m.def("exit_scaling_fit",
          [](double a, const std::vector<double>& eps_grid, int n_fixed, const std::vector<int>& n_grid, double eps_fixed) {
              const auto r = exit_scaling_fit(a, eps_grid, n_fixed, n_grid, eps_fixed);
              py::dict d;
              d["slope_eps"] = r.fit_eps.exponent;
              d["slope_n"] = r.fit_n.exponent;
              d["r2_eps"] = r.fit_eps.r_squared;
              d["r2_n"] = r.fit_n.r_squared;
              return d;
          },
          py::arg("a"), py::arg("eps_grid"), py::arg("n_fixed"), py::arg("n_grid"), py::arg("eps_fixed"));
    m.def("run_scenario",
          [](const std::string& id, const std::string& scenario_dir, const std::string& out_dir) {
              const auto s = find_scenario(id, scenario_dir.empty() ? default_scenario_dir() : scenario_dir);
              Report r;
              {
                  py::gil_scoped_release release;
                  r = run_scenario(s, out_dir);
              }
              py::dict d;
              d["id"] = r.id;
              d["passed"] = r.passed();
              d["error"] = r.error;
              d["values"] = r.measurement.values;
              d["runtime_s"] = r.measurement.runtime_s;
              py::list v;
              for (const auto& c : r.verdicts) v.append(py::make_tuple(c.check.name, c.measured, c.pass));
              d["verdicts"] = v;
              d["report"] = format_report(r);
              return d;
          },
          py::arg("id"), py::arg("scenario_dir") = "", py::arg("out_dir") = "");
    m.def("svg_from_csv", [](const std::string& csv, const std::string& title) {
        return svg_from_rows(parse_trajectory_csv(csv), title);
    }, py::arg("csv"), py::arg("title") = "");
}
