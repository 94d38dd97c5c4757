#include "switchosc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "switchosc/analytic_flow.hpp"
#include "switchosc/core.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/experiments.hpp"
#include "switchosc/layer_integrator.hpp"
#include "switchosc/output.hpp"
#include "switchosc/poincare.hpp"
#include "switchosc/regularization.hpp"
#include "switchosc/sliding.hpp"
#include "switchosc/transition.hpp"

namespace switchosc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string model = "linear";
    double a = 1.0;
    double epsilon = 0.0;
    std::string psi = "cubic";
    std::string config;
};

void add_common(CLI::App* c, Common& o) {
    c->add_option("--model", o.model, "linear | nonlinear")->check(CLI::IsMember({"linear", "nonlinear"}));
    c->add_option("--a", o.a, "damping a = R/L");
    c->add_option("--epsilon", o.epsilon, "layer half-width; 0 selects the discontinuous system");
    c->add_option("--psi", o.psi, "cubic | sine | path to a JSON transition function");
    c->add_option("--config", o.config, "JSON file with option values; flags override it");
}

// Fills options that were not given on the command line from the config file.
void apply_config(CLI::App* c, const std::string& path) {
    if (path.empty()) return;
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = c->get_option("--" + k);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("config key '" + k + "' is not an option of " + c->get_name());
        }
        if (opt->count() > 0) continue;
        std::vector<std::string> vals;
        auto str = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
        if (v.is_array())
            for (const auto& e : v) vals.push_back(str(e));
        else if (v.is_boolean())
            vals.push_back(v.get<bool>() ? "true" : "false");
        else
            vals.push_back(str(v));
        opt->clear();
        for (const auto& s : vals) opt->add_result(s);
        opt->run_callback();
    }
}

OscillatorParams make_params(const Common& o) {
    std::shared_ptr<const TransitionFunction> psi;
    if (o.psi == "cubic") psi = TransitionFunction::cubic();
    else if (o.psi == "sine") psi = TransitionFunction::sine();
    else psi = TransitionFunction::from_file(o.psi);
    OscillatorParams p;
    p.a = o.a;
    p.epsilon = o.epsilon;
    p.psi = psi;
    p.validate();
    return p;
}

std::pair<double, double> parse_range(const std::string& s) {
    const auto c = s.find(':');
    if (c == std::string::npos) throw UsageError("range must be lo:hi");
    const double lo = parse_number(s.substr(0, c)), hi = parse_number(s.substr(c + 1));
    if (!(hi > lo)) throw UsageError("range needs hi > lo");
    return {lo, hi};
}

std::string out_root() { return default_output_dir(); }

void emit(const std::string& text, const std::string& path, std::ostream& out, std::vector<std::string>& written) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
        written.push_back(path);
    }
}

Mode parse_mode(const std::string& s) {
    if (s == "flow+") return Mode::FlowPlus;
    if (s == "flow-") return Mode::FlowMinus;
    if (s == "sliding") return Mode::Sliding;
    throw UsageError("mode must be flow+, flow- or sliding");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"switched oscillator toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common sim_c;
    double x0 = 0.0, y0 = 0.0, x_end = 20.0, tol = 1e-10;
    std::optional<double> v0;
    std::string mode_s, sim_out, sim_svg;
    int branch = -1;
    auto* sim = app.add_subcommand("simulate", "trajectory CSV: x,y_or_v,mode,branch,event");
    add_common(sim, sim_c);
    sim->add_option("--x0", x0, "start x");
    sim->add_option("--y0", y0, "start y");
    sim->add_option("--v0", v0, "start v = y/epsilon (regularized only)");
    sim->add_option("--mode", mode_s, "flow+ | flow- | sliding, for y0 = 0");
    sim->add_option("--branch", branch, "sliding branch for --mode sliding (-1 lets the threshold decide)");
    sim->add_option("--x-end", x_end, "end x");
    sim->add_option("--tol", tol, "tolerance");
    sim->add_option("--out", sim_out, "CSV path (default stdout)");
    sim->add_option("--svg", sim_svg, "also write an SVG plot");

    auto* orbit = app.add_subcommand("orbit", "periodic orbits");
    orbit->require_subcommand(1);
    Common orb_c;
    bool orb_sliding = false;
    auto* find = orbit->add_subcommand("find", "period-4 search; prints fixed point and multiplier");
    add_common(find, orb_c);
    find->add_flag("--sliding", orb_sliding, "sliding orbit (linear model)");

    Common man_c;
    std::string man_range = "0:8", man_out;
    auto* man = app.add_subcommand("manifolds", "sliding branch table over an x range");
    add_common(man, man_c);
    man->add_option("--range", man_range, "lo:hi");
    man->add_option("--out", man_out, "CSV path (default stdout)");

    Common map_c;
    std::string map_which = "composite", map_range = "0.01:0.66", map_out;
    int map_points = 50;
    auto* mp = app.add_subcommand("map", "tabulate P+, P-, P or P_eps on a grid");
    add_common(mp, map_c);
    mp->add_option("--which", map_which, "plus | minus | composite | regularized")
        ->check(CLI::IsMember({"plus", "minus", "composite", "regularized"}));
    mp->add_option("--range", map_range, "lo:hi");
    mp->add_option("--points", map_points, "grid size")->check(CLI::PositiveNumber);
    mp->add_option("--out", map_out, "CSV path (default stdout)");

    Common age_c;
    std::string age_range = "0:40", age_out;
    std::optional<double> age_x0, age_v0;
    auto* age = app.add_subcommand("ageing", "branch widths and slid lengths");
    add_common(age, age_c);
    age->add_option("--range", age_range, "lo:hi");
    age->add_option("--x0", age_x0, "start x of a regularized run");
    age->add_option("--v0", age_v0, "start v of a regularized run");
    age->add_option("--out", age_out, "CSV path (default stdout)");

    Common sc_c;
    std::vector<double> sc_eps = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    std::vector<int> sc_ns = {4, 8, 16, 32};
    int sc_n = 10;
    double sc_e = 1e-3;
    auto* sc = app.add_subcommand("scaling", "exit-point fits in eps and n");
    add_common(sc, sc_c);
    sc->add_option("--eps-grid", sc_eps, "eps values at fixed n");
    sc->add_option("--n", sc_n, "fixed half index");
    sc->add_option("--n-grid", sc_ns, "half indices at fixed eps");
    sc->add_option("--eps", sc_e, "fixed eps");

    std::string rep_id, rep_dir, rep_out;
    auto* rep = app.add_subcommand("reproduce", "run a scenario; writes out/<id>/");
    rep->add_option("id", rep_id, "scenario id, or 'all'")->required();
    rep->add_option("--scenarios", rep_dir, "scenario directory");
    rep->add_option("--out", rep_out, "output root (default $SWITCHOSC_OUT or out)");

    std::string psi_file;
    auto* vp = app.add_subcommand("validate-psi", "property suite for a transition function file");
    vp->add_option("file", psi_file, "JSON file")->required();

    std::string pc_in, pc_out, pc_title;
    auto* pc = app.add_subcommand("plot-from-csv", "SVG from a trajectory CSV");
    pc->add_option("csv", pc_in, "trajectory CSV")->required();
    pc->add_option("--out", pc_out, "SVG path (default stdout)");
    pc->add_option("--title", pc_title, "plot title");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::vector<std::string> written;
    try {
        if (*sim) {
            apply_config(sim, sim_c.config);
            const auto p = make_params(sim_c);
            const auto model = parse_model(sim_c.model);
            Trajectory t;
            if (p.epsilon > 0.0) {
                if (!mode_s.empty()) throw UsageError("--mode applies to the discontinuous system only");
                const double v = v0 ? *v0 : y0 / p.epsilon;
                LayerOptions lo;
                lo.tol = tol;
                t = integrate_layer(model, p, {x0, v}, x_end, lo).trajectory;
            } else {
                if (v0) throw UsageError("--v0 needs epsilon > 0");
                HybridState s{x0, y0, y0 >= 0.0 ? Mode::FlowPlus : Mode::FlowMinus, branch};
                if (!mode_s.empty()) s.mode = parse_mode(mode_s);
                else if (y0 == 0.0) throw UsageError("y0 = 0 needs --mode");
                DiscontinuousOptions o;
                o.tol = std::min(tol, 1e-12);
                t = simulate_discontinuous(model, p, s, x_end, o);
            }
            const auto csv = trajectory_csv(t);
            emit(csv, sim_out, out, written);
            if (!sim_svg.empty()) {
                write_text_file(sim_svg, svg_from_rows(parse_trajectory_csv(csv), fs::path(sim_out.empty() ? "trajectory" : sim_out).stem().string()));
                written.push_back(sim_svg);
            }
        } else if (*find) {
            apply_config(find, orb_c.config);
            const auto p = make_params(orb_c);
            const auto model = parse_model(orb_c.model);
            if (model == SwitchingModel::Nonlinear) {
                if (p.epsilon > 0.0) throw UsageError("regularized nonlinear runs have no periodic orbit; use simulate");
                const auto o = find_sliding_period4_nonlinear(p.a, 2);
                out << "x_a " << format_number(o.x_a) << "\nclosure_error " << format_number(o.closure_error) << '\n';
            } else if (orb_sliding) {
                if (p.epsilon > 0.0) {
                    const auto o = find_regularized_sliding_orbit_linear(p);
                    out << "x_star " << format_number(o.x_star) << "\nmultiplier " << format_number(o.contraction)
                        << "\nlog10_multiplier " << format_number(o.log10_contraction) << "\nperiod_error "
                        << format_number(o.period_error) << '\n';
                } else {
                    const auto o = find_sliding_period4_linear(p.a);
                    out << "x1 " << format_number(o.x1) << "\nx2 " << format_number(o.x2) << "\nx3 "
                        << format_number(o.x3) << "\nclosure_error " << format_number(o.closure_error) << '\n';
                }
            } else if (p.epsilon > 0.0) {
                const auto o = find_regularized_nonsliding_linear(p);
                out << "x_star " << format_number(o.x_star) << "\nmultiplier " << format_number(o.derivative)
                    << "\nresidual " << format_number(o.residual) << '\n';
            } else {
                const auto o = find_nonsliding_period4(p.a);
                out << "x_star " << format_number(o.x_star) << "\nmultiplier " << format_number(o.multiplier)
                    << "\nresidual " << format_number(o.residual) << "\nstable " << (o.stable ? "yes" : "no") << '\n';
            }
        } else if (*man) {
            apply_config(man, man_c.config);
            const auto [lo, hi] = parse_range(man_range);
            const auto model = parse_model(man_c.model);
            std::vector<std::vector<std::string>> rows;
            for (const auto& b : branches(model, lo, hi))
                rows.push_back({std::to_string(b.n), format_number(b.lo), format_number(b.hi),
                                format_number(b.width()), std::string(to_string(b.stability()))});
            emit(table_csv({"n", "lo", "hi", "width", "stability"}, rows), man_out, out, written);
        } else if (*mp) {
            apply_config(mp, map_c.config);
            auto p = make_params(map_c);
            const auto [lo, hi] = parse_range(map_range);
            if (map_which == "regularized" && !(p.epsilon > 0.0)) throw UsageError("--which regularized needs epsilon > 0");
            std::vector<std::vector<std::string>> rows;
            for (int i = 0; i < map_points; ++i) {
                const double x = map_points == 1 ? lo : lo + (hi - lo) * i / (map_points - 1);
                std::string v;
                try {
                    double r = 0.0;
                    if (map_which == "plus") r = next_crossing(Side::Plus, x, p).x_next;
                    else if (map_which == "minus") r = next_crossing(Side::Minus, x, p).x_next;
                    else if (map_which == "composite") r = composite_map(x, p);
                    else r = regularized_poincare_linear(x, p);
                    v = format_number(r);
                } catch (const std::exception& e) {
                    v = "nan";
                }
                rows.push_back({format_number(x), v});
            }
            emit(table_csv({"x", map_which}, rows), map_out, out, written);
        } else if (*age) {
            apply_config(age, age_c.config);
            const auto p = make_params(age_c);
            const auto model = parse_model(age_c.model);
            const auto [lo, hi] = parse_range(age_range);
            std::vector<std::vector<std::string>> rows;
            if (age_x0) {
                if (!(p.epsilon > 0.0)) throw UsageError("a run-based ageing table needs epsilon > 0");
                auto run = integrate_layer(model, p, {*age_x0, age_v0.value_or(1.1)}, hi);
                detect_captures(run.trajectory);
                for (const auto& r : ageing_metrics(run.trajectory))
                    rows.push_back({std::to_string(r.n), format_number(r.branch_width), format_number(r.slid_length)});
            } else {
                for (const auto& r : ageing_metrics(model, lo, hi))
                    rows.push_back({std::to_string(r.n), format_number(r.branch_width), format_number(r.slid_length)});
            }
            emit(table_csv({"n", "branch_width", "slid_length"}, rows), age_out, out, written);
        } else if (*sc) {
            apply_config(sc, sc_c.config);
            const auto r = exit_scaling_fit(sc_c.a, sc_eps, sc_n, sc_ns, sc_e);
            out << "slope_eps " << format_number(r.fit_eps.exponent) << " r2 " << format_number(r.fit_eps.r_squared) << '\n';
            out << "slope_n " << format_number(r.fit_n.exponent) << " r2 " << format_number(r.fit_n.r_squared) << '\n';
            for (const auto& q : r.eps_points)
                out << "eps " << format_number(q.epsilon) << " n " << q.n << " x_e " << format_number(q.m.x_e)
                    << " deviation " << format_number(q.m.deviation) << '\n';
            for (const auto& q : r.n_points)
                out << "eps " << format_number(q.epsilon) << " n " << q.n << " x_e " << format_number(q.m.x_e)
                    << " deviation " << format_number(q.m.deviation) << '\n';
        } else if (*rep) {
            const std::string dir = rep_dir.empty() ? default_scenario_dir() : rep_dir;
            const std::string root = rep_out.empty() ? out_root() : rep_out;
            std::vector<std::string> ids;
            if (rep_id == "all") ids = list_scenarios(dir);
            else ids = {rep_id};
            if (ids.empty()) throw UsageError("no scenarios in " + dir);
            bool ok = true;
            for (const auto& id : ids) {
                Scenario s;
                try {
                    s = find_scenario(id, dir);
                } catch (const DomainError& e) {
                    throw UsageError(e.what());
                }
                const auto r = run_scenario(s, root);
                out << format_report(r);
                ok = ok && r.passed();
            }
            return ok ? kExitOk : kExitFailed;
        } else if (*vp) {
            if (!fs::is_regular_file(psi_file)) throw UsageError("no such file: " + psi_file);
            std::shared_ptr<const TransitionFunction> f;
            try {
                f = TransitionFunction::from_file(psi_file);
            } catch (const DomainError& e) {
                out << "invalid: " << e.what() << '\n';
                return kExitFailed;
            }
            const auto v = f->validate();
            for (const auto& s : v.failures) out << "failure: " << s << '\n';
            for (const auto& s : v.notes) out << "note: " << s << '\n';
            out << (v.ok ? "valid" : "invalid") << '\n';
            return v.ok ? kExitOk : kExitFailed;
        } else if (*pc) {
            const auto rows = parse_trajectory_csv(read_text_file(pc_in));
            emit(svg_from_rows(rows, pc_title.empty() ? fs::path(pc_in).stem().string() : pc_title), pc_out, out, written);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
    for (const auto& w : written) err << "wrote " << w << '\n';
    return kExitOk;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace switchosc
