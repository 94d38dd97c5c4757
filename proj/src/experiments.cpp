#include "switchosc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include "switchosc/analytic_flow.hpp"
#include "switchosc/core.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/layer_integrator.hpp"
#include "switchosc/output.hpp"
#include "switchosc/poincare.hpp"
#include "switchosc/regularization.hpp"
#include "switchosc/scaling.hpp"
#include "switchosc/sliding.hpp"
#include "switchosc/transition.hpp"

#ifndef SWITCHOSC_SOURCE_DIR
#define SWITCHOSC_SOURCE_DIR "."
#endif

namespace switchosc {

namespace fs = std::filesystem;
using nlohmann::json;

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.id = j.at("id").get<std::string>();
    s.title = j.value("title", "");
    s.kind = j.at("kind").get<std::string>();
    s.criterion = j.value("criterion", 0);
    if (j.contains("settings")) s.settings = j.at("settings");
    if (!s.settings.is_object()) throw DomainError(s.id + ": settings must be an object");
    for (const auto& c : j.value("checks", json::array())) {
        Check k;
        k.name = c.at("name").get<std::string>();
        k.key = c.value("key", k.name);
        k.kind = c.value("kind", "abs");
        k.target = c.value("target", 0.0);
        k.tol = c.value("tol", 0.0);
        k.limit = c.value("limit", 0.0);
        k.lo = c.value("lo", 0.0);
        k.hi = c.value("hi", 0.0);
        k.basis = c.value("basis", "");
        static const std::vector<std::string> kinds = {"abs", "lt", "le", "gt", "ge", "range", "true"};
        if (std::find(kinds.begin(), kinds.end(), k.kind) == kinds.end())
            throw DomainError(s.id + ": unknown check kind '" + k.kind + "'");
        s.checks.push_back(k);
    }
    const auto known = known_kinds();
    if (std::find(known.begin(), known.end(), s.kind) == known.end())
        throw DomainError(s.id + ": unknown scenario kind '" + s.kind + "'");
    return s;
}

Scenario load_scenario(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw DomainError(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

Scenario find_scenario(const std::string& id, const std::string& dir) {
    const fs::path p = fs::path(dir) / (id + ".json");
    if (!fs::exists(p)) throw DomainError("unknown scenario '" + id + "' (looked in " + dir + ")");
    auto s = load_scenario(p.string());
    if (s.id != id) throw DomainError(p.string() + ": id mismatch");
    return s;
}

std::vector<std::string> list_scenarios(const std::string& dir) {
    std::vector<std::string> ids;
    if (!fs::is_directory(dir)) return ids;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::string default_scenario_dir() {
    if (const char* e = std::getenv("SWITCHOSC_SCENARIOS"); e && *e) return e;
    return (fs::path(SWITCHOSC_SOURCE_DIR) / "scenarios").string();
}

std::string default_output_dir() {
    if (const char* e = std::getenv("SWITCHOSC_OUT"); e && *e) return e;
    return "out";
}

namespace {

double num(const json& s, const char* key, double def) { return s.contains(key) ? s.at(key).get<double>() : def; }
int inum(const json& s, const char* key, int def) { return s.contains(key) ? s.at(key).get<int>() : def; }
std::vector<double> vec(const json& s, const char* key, std::vector<double> def) {
    return s.contains(key) ? s.at(key).get<std::vector<double>>() : def;
}
std::vector<int> ivec(const json& s, const char* key, std::vector<int> def) {
    return s.contains(key) ? s.at(key).get<std::vector<int>>() : def;
}

std::string tag(double v) { return format_number(v); }

void add_trajectory(Measurement& m, const std::string& name, const Trajectory& t, const std::string& title) {
    const auto csv = trajectory_csv(t);
    m.artifacts.push_back({name + ".csv", csv});
    m.artifacts.push_back({name + ".svg", svg_from_rows(parse_trajectory_csv(csv), title)});
}

double max_v_after(const Trajectory& t, double x_from) {
    double vmax = -INFINITY;
    for (const auto& s : t.flatten())
        if (s.x > x_from) vmax = std::max(vmax, s.y);
    return vmax;
}

// E1
void x0_root(const json&, Measurement& m) {
    m.values["x0"] = solve_x0();
    m.values["dPda_at_half"] = dP_da_at_zero(0.5);
}

// E2
void nonsliding_orbit(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const auto o = find_nonsliding_period4(a);
    m.values["x_star"] = o.x_star;
    m.values["multiplier"] = o.multiplier;
    m.values["residual"] = o.residual;
    const auto t = simulate_discontinuous(SwitchingModel::Linear, OscillatorParams::discontinuous(a),
                                          {o.x_star, 0.0, Mode::FlowMinus, -1}, o.x_star + 8.5);
    add_trajectory(m, "orbit", t, "non-sliding period-4 orbit, a = " + tag(a));
}

// E3
void a_zero_limit(const json& s, Measurement& m) {
    const double a = num(s, "a", 1e-8);
    const int n = inum(s, "samples", 50);
    const double bound = num(s, "bound", 1e-6);
    double worst = 0.0, worst_scaled = 0.0;
    int over = 0;
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) / n * (2.0 / 3.0);
        const double d = std::fabs(composite_map(x, a) - (x + 4.0));
        worst = std::max(worst, d);
        worst_scaled = std::max(worst_scaled, d * x / a);
        if (d >= bound) ++over;
        rows.push_back({format_number(x), format_number(d)});
    }
    m.values["max_deviation"] = worst;
    m.values["samples_over_bound"] = over;
    // deviation ~ C a / x near the left end
    m.values["max_deviation_times_x_over_a"] = worst_scaled;
    m.artifacts.push_back({"deviation.csv", table_csv({"x", "deviation"}, rows)});
}

// E4
void confinement_intervals(const json& s, Measurement& m) {
    const auto as = vec(s, "a_values", {0.01, 0.1, 1.0, 10.0, 100.0});
    const int n_max = inum(s, "n_max", 10);
    int violations = 0;
    double min_margin = INFINITY;
    std::vector<std::vector<std::string>> rows;
    for (double a : as) {
        const auto p = OscillatorParams::discontinuous(a);
        const double x1 = next_crossing(Side::Plus, 10.0 / 3.0, p).x_next;
        const bool in1 = x1 > 4.0 && x1 < 14.0 / 3.0;
        violations += !in1;
        min_margin = std::min(min_margin, std::min(x1 - 4.0, 14.0 / 3.0 - x1));
        rows.push_back({format_number(a), "plus_10/3", "0", format_number(x1), in1 ? "1" : "0"});
        for (const auto& r : check_no_nonsliding_periodic_nonlinear(a, n_max).rows) {
            const bool inm = r.minus_landing > 4.0 * r.n + 2.0 && r.minus_landing < 4.0 * r.n + 4.0;
            const bool inp = r.plus_landing > 4.0 * r.n - 4.0 / 3.0 && r.plus_landing < 4.0 * r.n - 2.0 / 3.0;
            violations += !inm + !inp;
            min_margin = std::min({min_margin, r.minus_margin, r.plus_margin});
            rows.push_back({format_number(a), "minus_4n", std::to_string(r.n), format_number(r.minus_landing), inm ? "1" : "0"});
            rows.push_back({format_number(a), "plus_4n-2", std::to_string(r.n), format_number(r.plus_landing), inp ? "1" : "0"});
        }
    }
    m.values["violations"] = violations;
    m.values["min_margin"] = min_margin;
    m.artifacts.push_back({"landings.csv", table_csv({"a", "map", "n", "landing", "inside"}, rows)});
}

// E5
void sliding_orbit_linear(const json& s, Measurement& m) {
    const double a = num(s, "a_present", 10.0);
    const double a_abs = num(s, "a_absent", 1e-3);
    const auto o = find_sliding_period4_linear(a);
    m.values["x1"] = o.x1;
    m.values["x2"] = o.x2;
    m.values["x3"] = o.x3;
    m.values["closure_error"] = o.closure_error;
    m.values["landing_inside"] = (o.x3 > 20.0 / 3.0 && o.x3 < 22.0 / 3.0) ? 1.0 : 0.0;
    add_trajectory(m, "orbit", o.trajectory, "sliding period-4 orbit, a = " + tag(a));
    try {
        const auto q = find_sliding_period4_linear(a_abs);
        m.values["absent_reported"] = 0.0;
        m.notes.push_back("orbit found at a = " + tag(a_abs) + ", landing " + tag(q.x3));
    } catch (const NoRootError& e) {
        m.values["absent_reported"] = 1.0;
        m.notes.push_back("a = " + tag(a_abs) + ": " + e.what());
    }
}

// E6
void nonlinear_orbit(const json& s, Measurement& m) {
    const auto as = vec(s, "a_values", {0.1, 0.5, 2.0});
    const int periods = inum(s, "periods", 3);
    double worst = 0.0;
    int outside = 0;
    for (double a : as) {
        const auto o = find_sliding_period4_nonlinear(a, periods);
        m.values["x_a@" + tag(a)] = o.x_a;
        m.values["closure@" + tag(a)] = o.closure_error;
        worst = std::max(worst, o.closure_error);
        outside += !(o.x_a > 2.0 && o.x_a < 4.0);
        add_trajectory(m, "orbit_a" + tag(a), o.trajectory, "nonlinear period-4 sliding orbit, a = " + tag(a));
    }
    m.values["max_closure"] = worst;
    m.values["x_a_outside"] = outside;
}

// bisection oracle on -a*eps*s - sin(omega pi x) = 0 near n/omega
double fold_oracle(Side side, int n, const OscillatorParams& p) {
    const double w = p.omega(side).value();
    const double c = -p.a * p.epsilon * sign_of(side);
    auto g = [&](double x) { return c - std::sin(w * kPi * x); };
    double lo = (n - 0.25) / w, hi = (n + 0.25) / w;
    double glo = g(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) { lo = mid; glo = gm; } else { hi = mid; }
    }
    return 0.5 * (lo + hi);
}

// E7, FIG6
void fold_points(const json& s, Measurement& m) {
    const auto aeps = vec(s, "a_eps", {1e-5, 1e-3});
    const double a = num(s, "a", 1.0);
    const int n_max = inum(s, "n_max", 12);
    double worst = 0.0;
    std::vector<std::vector<std::string>> rows;
    SvgPlot plot;
    plot.title = "fold points on v = +1 and v = -1";
    plot.ylabel = "v";
    SvgSeries plus{"v = +1", {}, "#d62728", true}, minus{"v = -1", {}, "#1f77b4", true};
    for (double ae : aeps) {
        const auto p = OscillatorParams::regularized(a, ae / a);
        for (Side side : {Side::Plus, Side::Minus}) {
            for (int n = 0; n <= n_max; ++n) {
                const double f = fold_point(side, n, p);
                const double o = fold_oracle(side, n, p);
                worst = std::max(worst, std::fabs(f - o));
                rows.push_back({format_number(ae), side == Side::Plus ? "+" : "-", std::to_string(n), format_number(f),
                                format_number(o)});
                if (ae == aeps.back()) (side == Side::Plus ? plus : minus).points.emplace_back(f, sign_of(side));
            }
        }
    }
    plot.series = {plus, minus};
    m.values["max_fold_error"] = worst;
    m.artifacts.push_back({"folds.csv", table_csv({"a_eps", "side", "n", "formula", "bisection"}, rows)});
    m.artifacts.push_back({"folds.svg", render_svg(plot)});
}

// E8
void regularized_linear(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const auto grid = vec(s, "eps_grid", {1e-2, 2.5e-3, 1e-3});
    const double a_slide = num(s, "a_slide", 2.0);
    const auto eslide = vec(s, "eps_slide", {1e-2, 1e-3});
    const auto diag = vec(s, "eps_diagnostic", {1e-4, 1e-5});
    const double xd = find_nonsliding_period4(a).x_star;
    m.values["x_star_discontinuous"] = xd;

    auto offsets = [&](const std::vector<double>& g) {
        std::vector<std::future<RegularizedFixedPoint>> f;
        for (double e : g)
            f.push_back(std::async(std::launch::async, [a, e] {
                return find_regularized_nonsliding_linear(OscillatorParams::regularized(a, e));
            }));
        std::vector<RegularizedFixedPoint> r;
        for (auto& x : f) r.push_back(x.get());
        return r;
    };
    const auto fp = offsets(grid);
    std::vector<std::pair<double, double>> pts;
    bool monotone = true;
    double prev = INFINITY;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double off = std::fabs(fp[i].x_star - xd);
        m.values["offset@" + tag(grid[i])] = off;
        m.values["fixed_point_derivative@" + tag(grid[i])] = fp[i].derivative;
        if (!(off < prev)) monotone = false;
        prev = off;
        pts.emplace_back(grid[i], off);
        rows.push_back({"nonsliding", format_number(grid[i]), format_number(fp[i].x_star), format_number(off),
                        format_number(fp[i].derivative)});
    }
    m.values["monotone"] = monotone ? 1.0 : 0.0;
    // least-squares slope of log offset against log eps
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(pts.size());
        for (const auto& [e, o] : pts) {
            const double lx = std::log(e), ly = std::log(o);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        m.values["order"] = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    }
    if (diag.size() >= 2) {
        const auto fd = offsets(diag);
        const double o1 = std::fabs(fd[0].x_star - xd), o2 = std::fabs(fd[1].x_star - xd);
        m.values["order_local_small_eps"] = std::log(o1 / o2) / std::log(diag[0] / diag[1]);
        for (std::size_t i = 0; i < diag.size(); ++i)
            rows.push_back({"nonsliding", format_number(diag[i]), format_number(fd[i].x_star),
                            format_number(std::fabs(fd[i].x_star - xd)), format_number(fd[i].derivative)});
    }

    std::vector<std::future<RegularizedSlidingOrbit>> fs;
    std::vector<double> eall = eslide;
    eall.push_back(eslide.front() / 2.0);
    for (double e : eall)
        fs.push_back(std::async(std::launch::async, [a_slide, e] {
            return find_regularized_sliding_orbit_linear(OscillatorParams::regularized(a_slide, e));
        }));
    std::vector<RegularizedSlidingOrbit> so;
    for (auto& f : fs) so.push_back(f.get());
    double worst_period = 0.0;
    for (std::size_t i = 0; i < eslide.size(); ++i) {
        m.values["log10_contraction@" + tag(eslide[i])] = so[i].log10_contraction;
        m.values["fd_contraction@" + tag(eslide[i])] = so[i].contraction_fd;
        worst_period = std::max(worst_period, so[i].period_error);
        rows.push_back({"sliding", format_number(eslide[i]), format_number(so[i].x_star),
                        format_number(so[i].log10_contraction), format_number(so[i].contraction_fd)});
    }
    m.values["sliding_period_error"] = worst_period;
    m.values["contraction_drop_decades"] = so.front().log10_contraction - so[eslide.size() - 1].log10_contraction;
    // exponential-smallness signature, recorded only
    m.values["half_eps_below_square"] =
        so.back().log10_contraction < 2.0 * so.front().log10_contraction ? 1.0 : 0.0;
    m.artifacts.push_back({"regularized.csv", table_csv({"orbit", "epsilon", "x_star", "offset_or_log10c", "derivative_or_fd"}, rows)});
    add_trajectory(m, "sliding_orbit", so.front().trajectory,
                   "regularized sliding orbit, a = " + tag(a_slide) + ", eps = " + tag(eslide.front()));
    m.notes.push_back("contraction from the variational equation; finite-difference values are listed beside it");
}

// E9
void exit_scaling(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const auto eg = vec(s, "eps_grid", {1e-2, 3e-3, 1e-3, 3e-4, 1e-4});
    const int n_fixed = inum(s, "n_fixed", 10);
    const auto ng = ivec(s, "n_grid", {4, 8, 16, 32});
    const double e_fixed = num(s, "eps_fixed", 1e-3);
    const auto r = exit_scaling_fit(a, eg, n_fixed, ng, e_fixed);
    m.values["slope_eps"] = r.fit_eps.exponent;
    m.values["slope_n"] = r.fit_n.exponent;
    m.values["r2_eps"] = r.fit_eps.r_squared;
    m.values["r2_n"] = r.fit_n.r_squared;
    std::vector<std::vector<std::string>> rows;
    SvgPlot pe, pn;
    pe.title = "exit delay against eps, n = " + std::to_string(n_fixed);
    pe.xlabel = "eps";
    pe.ylabel = "x_e - x_fold";
    pe.log_x = pe.log_y = true;
    pn = pe;
    pn.title = "exit delay against n, eps = " + tag(e_fixed);
    pn.xlabel = "n";
    SvgSeries de{"measured", {}, "#1f77b4", true}, dn = de;
    for (const auto& q : r.eps_points) {
        rows.push_back({"eps", std::to_string(q.n), format_number(q.epsilon), format_number(q.m.x_e),
                        format_number(q.m.x_fold), format_number(q.m.deviation)});
        de.points.emplace_back(q.epsilon, q.m.deviation);
    }
    for (const auto& q : r.n_points) {
        rows.push_back({"n", std::to_string(q.n), format_number(q.epsilon), format_number(q.m.x_e),
                        format_number(q.m.x_fold), format_number(q.m.deviation)});
        dn.points.emplace_back(q.n, q.m.deviation);
    }
    auto fitline = [](const ScalingFit& f, const SvgSeries& d) {
        SvgSeries l{"fit, slope " + tag(f.exponent), {}, "#d62728"};
        for (const auto& [x, y] : d.points) l.points.emplace_back(x, std::pow(10.0, f.intercept) * std::pow(x, f.exponent));
        std::sort(l.points.begin(), l.points.end());
        return l;
    };
    pe.series = {de, fitline(r.fit_eps, de)};
    pn.series = {dn, fitline(r.fit_n, dn)};
    m.artifacts.push_back({"exits.csv", table_csv({"sweep", "n", "epsilon", "x_e", "x_fold", "deviation"}, rows)});
    m.artifacts.push_back({"scaling_eps.svg", render_svg(pe)});
    m.artifacts.push_back({"scaling_n.svg", render_svg(pn)});
}

// E10
void slow_manifold_closeness(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const double eps = num(s, "epsilon", 1e-3);
    const auto ns = ivec(s, "n_values", {6, 12, 22});
    const auto p = OscillatorParams::regularized(a, eps);
    double worst = 0.0, worst_wide = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (int n : ns) {
        const auto c = critical_branch_reg(SwitchingModel::Nonlinear, 2 * n, p);
        const double x0 = 2.0 * n;
        const double lo = 7.0 * n / 3.0, hi = 3.0 * n + 2.0;
        const double wlo = 5.0 * n / 3.0, whi = 10.0 * n / 3.0;
        const auto run = integrate_layer(SwitchingModel::Nonlinear, p, {x0, c.v0(x0)}, std::min(whi, 4.0 * n - 0.5));
        double r = 0.0, rw = 0.0;
        for (double x = lo; x <= hi; x += 1e-3)
            r = std::max(r, std::fabs(run.trajectory.value_at(x) - c.v0(x)) / (5.0 * eps * std::fabs(c.v1(x))));
        // wider window, from the start point onwards
        for (double x = std::max(wlo, x0 + 0.05); x <= std::min(whi, run.trajectory.x_end()); x += 1e-3)
            rw = std::max(rw, std::fabs(run.trajectory.value_at(x) - c.v0(x)) / (5.0 * eps * std::fabs(c.v1(x))));
        m.values["ratio@" + std::to_string(n)] = r;
        m.values["ratio_wide@" + std::to_string(n)] = rw;
        worst = std::max(worst, r);
        worst_wide = std::max(worst_wide, rw);
        rows.push_back({std::to_string(n), format_number(lo), format_number(hi), format_number(r), format_number(rw)});
    }
    m.values["max_ratio"] = worst;
    m.values["max_ratio_wide"] = worst_wide;
    m.artifacts.push_back({"closeness.csv", table_csv({"n", "x_lo", "x_hi", "ratio", "ratio_wide"}, rows)});
    m.notes.push_back("ratio = sup |v - v0| / (5 eps |v1|); pass needs <= 1");
}

const Event* first_event(const Trajectory& t, EventKind k, double after = -INFINITY) {
    for (const auto& e : t.events())
        if (e.kind == k && e.x > after) return &e;
    return nullptr;
}

// E11
void collapse_run(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const double eps = num(s, "epsilon", 0.0025);
    const double x0 = num(s, "x0", 14.1), v0 = num(s, "v0", 1.1);
    const double x_end = num(s, "x_end", 100.0);
    const auto p = OscillatorParams::regularized(a, eps);
    auto run = integrate_layer(SwitchingModel::Nonlinear, p, {x0, v0}, x_end);
    const auto caps = detect_captures(run.trajectory);
    if (caps.empty()) throw SolverError("no capture detected");
    const auto& c = caps.front();
    m.values["captured_branch"] = c.branch;
    const Event* exit = first_event(run.trajectory, EventKind::LayerExit, c.x_from);
    const Event* entry = nullptr;
    for (const auto& e : run.trajectory.events())
        if (e.kind == EventKind::LayerEntry && e.x <= c.x_from) entry = &e;
    if (!exit || !entry) throw SolverError("capture without layer entry/exit");
    m.values["x_entry"] = entry->x;
    m.values["x_e"] = exit->x;
    m.values["slid_length"] = exit->x - x0;
    m.values["layer_residence"] = exit->x - entry->x;
    m.values["max_v_after_exit"] = max_v_after(run.trajectory, exit->x);
    m.values["confined"] = m.values["max_v_after_exit"] <= 1.0 ? 1.0 : 0.0;
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : ageing_metrics(run.trajectory))
        rows.push_back({std::to_string(r.n), format_number(r.branch_width), format_number(r.slid_length)});
    m.artifacts.push_back({"ageing.csv", table_csv({"branch", "width", "layer_length"}, rows)});
    add_trajectory(m, "trajectory", run.trajectory, "capture and collapse, start (" + tag(x0) + ", " + tag(v0) + ")");
    m.notes.push_back("slid_length = x_e - x_start; layer_residence = x_e - x_entry");
}

// E12
void vr_convergence(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const double eps = num(s, "epsilon", 0.0025);
    const double x0 = num(s, "x0", 14.1), v0 = num(s, "v0", 1.1);
    const int n_lo = inum(s, "n_lo", 5), n_hi = inum(s, "n_hi", 30);
    const auto p = OscillatorParams::regularized(a, eps);
    const double x_end = 4.0 * (n_hi + 2) + 2.0;
    const auto run = integrate_layer(SwitchingModel::Nonlinear, p, {x0, v0}, x_end);
    const auto w = convergence_to_vr(run.trajectory, n_lo, n_hi);
    bool decreasing = true;
    double min_next = INFINITY;
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0 && !(w[i].sup_distance < w[i - 1].sup_distance)) decreasing = false;
        min_next = std::min(min_next, w[i].distance_to_next);
        rows.push_back({std::to_string(w[i].n), format_number(w[i].x_lo), format_number(w[i].sup_distance),
                        format_number(w[i].distance_to_next)});
    }
    m.values["decreasing"] = decreasing ? 1.0 : 0.0;
    m.values["min_consecutive_distance"] = min_next;
    m.values["last_sup_distance"] = w.back().sup_distance;
    const auto ref = v_r_reference(n_lo, p);
    m.values["x_eps_a"] = ref.x_eps_a();
    m.values["max_v_after"] = max_v_after(run.trajectory, 4.0 * n_lo);
    m.artifacts.push_back({"windows.csv", table_csv({"n", "x_lo", "sup_distance", "distance_to_next"}, rows)});
    SvgPlot pl;
    pl.title = "sup distance to the 4-periodic reference per window";
    pl.xlabel = "n";
    pl.ylabel = "sup |v - v_r|";
    pl.log_y = true;
    SvgSeries d{"sup distance", {}, "#1f77b4", true};
    for (const auto& r : w) d.points.emplace_back(r.n, r.sup_distance);
    pl.series = {d};
    m.artifacts.push_back({"windows.svg", render_svg(pl)});
}

// E13
void property_suites(const json& s, Measurement& m) {
    const double x_hi = num(s, "x_hi", 60.0);
    double agree = 0.0;
    for (int i = 0; i <= 6000; ++i) {
        const double x = x_hi * i / 6000.0;
        for (double l : {-1.0, 1.0}) {
            const double fl = forcing(SwitchingModel::Linear, x, l);
            const double fn = forcing(SwitchingModel::Nonlinear, x, l);
            const double ref = std::sin((l > 0 ? 1.5 : 0.5) * kPi * x);
            agree = std::max({agree, std::fabs(fl - fn), std::fabs(fl - ref)});
        }
    }
    m.values["forcing_agreement"] = agree;
    const auto v = TransitionFunction::cubic()->validate();
    m.values["psi_cubic_valid"] = v.ok ? 1.0 : 0.0;
    for (const auto& f : v.failures) m.notes.push_back("psi: " + f);

    double resid = 0.0, resid_reg = 0.0;
    const auto p = OscillatorParams::regularized(0.01, 1e-3);
    for (SwitchingModel mdl : {SwitchingModel::Linear, SwitchingModel::Nonlinear}) {
        for (const auto& b : branches(mdl, 0.0, x_hi)) {
            for (int i = 1; i < 200; ++i) {
                const double x = b.lo + (b.hi - b.lo) * i / 200.0;
                resid = std::max(resid, std::fabs(forcing(mdl, x, b.lambda(x))));
                const double v0 = critical_branch(mdl, b.n, x, p);
                resid_reg = std::max(resid_reg, std::fabs(forcing(mdl, x, p.transition().psi(v0))));
            }
        }
    }
    m.values["nullcline_residual"] = resid;
    m.values["critical_manifold_residual"] = resid_reg;

    const double a = num(s, "a", 0.01);
    const auto o = find_nonsliding_period4(a);
    const auto t = simulate_discontinuous(SwitchingModel::Linear, OscillatorParams::discontinuous(a),
                                          {o.x_star, 0.0, Mode::FlowMinus, -1}, o.x_star + 4.5);
    double best = INFINITY;
    for (const auto& e : t.events())
        if (e.kind == EventKind::Cross && e.x > o.x_star + 3.0) best = std::min(best, std::fabs(e.x - (o.x_star + 4.0)));
    m.values["hybrid_vs_map"] = best;
}

// FIG2
void linear_examples(const json& s, Measurement& m) {
    const double a = num(s, "a", 2.0);
    const double xs = num(s, "x_start", 3.355);
    const auto p = OscillatorParams::discontinuous(a);
    const auto o = find_sliding_period4_linear(a);
    m.values["x1"] = o.x1;
    m.values["x2"] = o.x2;
    m.values["x3"] = o.x3;
    m.values["landing_inside"] = (o.x3 > 20.0 / 3.0 && o.x3 < 22.0 / 3.0) ? 1.0 : 0.0;
    add_trajectory(m, "sliding_orbit", o.trajectory, "sliding orbit through (10/3, 0), a = " + tag(a));
    const auto t = simulate_discontinuous(SwitchingModel::Linear, p, {xs, 0.0, Mode::FlowPlus, -1}, xs + 4.5);
    int k = 0;
    for (const auto& e : t.events())
        if (e.kind == EventKind::Cross || e.kind == EventKind::SlideEntry)
            m.values["second_run_event" + std::to_string(++k)] = e.x;
    add_trajectory(m, "second_run", t, "run from (" + tag(xs) + ", 0), a = " + tag(a));
}

// FIG3
void linear_family(const json& s, Measurement& m) {
    const double a0 = num(s, "a_nonsliding", 0.01);
    const auto as = vec(s, "a_sliding", {0.1, 10.0});
    const auto o = find_nonsliding_period4(a0);
    m.values["x_star"] = o.x_star;
    m.values["multiplier"] = o.multiplier;
    const auto t = simulate_discontinuous(SwitchingModel::Linear, OscillatorParams::discontinuous(a0),
                                          {o.x_star, 0.0, Mode::FlowMinus, -1}, o.x_star + 8.5);
    add_trajectory(m, "orbit_a" + tag(a0), t, "period-4 orbit, a = " + tag(a0));
    for (double a : as) {
        const auto p = OscillatorParams::discontinuous(a);
        const double x1 = next_crossing(Side::Plus, 10.0 / 3.0, p).x_next;
        const auto tr = simulate_discontinuous(SwitchingModel::Linear, p, {x1, 0.0, Mode::FlowMinus, -1}, x1 + 8.0);
        double slid = 0.0;
        for (const auto& seg : tr.segments())
            if (seg.mode == Mode::Sliding) slid += seg.x_end() - seg.x_begin();
        m.values["slid_per_8@" + tag(a)] = slid;
        add_trajectory(m, "orbit_a" + tag(a), tr, "period-4 orbit, a = " + tag(a));
    }
}

// FIG4
void nonlinear_branches(const json& s, Measurement& m) {
    const int n_max = inum(s, "n_max", 10);
    const auto bs = branches(SwitchingModel::Nonlinear, 0.0, 2.0 * n_max);
    std::vector<std::vector<std::string>> rows;
    SvgPlot pl;
    pl.title = "sliding branches of the nonlinear model";
    pl.ylabel = "lambda";
    double width_err = 0.0;
    int count = 0;
    for (const auto& b : bs) {
        if (b.n > n_max) continue;
        ++count;
        width_err = std::max(width_err, std::fabs(b.width() - 4.0 * b.n / 3.0));
        rows.push_back({std::to_string(b.n), format_number(b.lo), format_number(b.hi), format_number(b.width()),
                        std::string(to_string(b.stability()))});
        SvgSeries sr{"", {}, b.stability() == FastStability::Attracting ? "#2ca02c" : "#ff7f0e"};
        sr.dashed = b.stability() != FastStability::Attracting;
        for (int i = 0; i <= 200; ++i) {
            const double x = b.lo + (b.hi - b.lo) * i / 200.0;
            sr.points.emplace_back(x, b.lambda(x));
        }
        pl.series.push_back(sr);
    }
    m.values["branch_count"] = count;
    m.values["width_error"] = width_err;
    m.artifacts.push_back({"branches.csv", table_csv({"n", "lo", "hi", "width", "stability"}, rows)});
    m.artifacts.push_back({"branches.svg", render_svg(pl)});
}

// FIG5
void nonlinear_orbits(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.5);
    const double x0 = num(s, "x0", 0.1), y0 = num(s, "y0", 0.5);
    const double x_end = num(s, "x_end", 16.0);
    const auto o = find_sliding_period4_nonlinear(a, static_cast<int>(x_end / 4.0));
    m.values["x_a"] = o.x_a;
    m.values["closure"] = o.closure_error;
    add_trajectory(m, "orbit", o.trajectory, "period-4 sliding orbit, a = " + tag(a));
    const auto p = OscillatorParams::discontinuous(a);
    const auto t = simulate_discontinuous(SwitchingModel::Nonlinear, p, {x0, y0, Mode::FlowPlus, -1}, x_end);
    if (const Event* e = first_event(t, EventKind::SlideEntry)) {
        m.values["attracted_entry_x"] = e->x;
        m.values["attracted_entry_branch"] = e->branch;
    }
    const auto conf = confinement_check(t);
    m.values["attracted_confined"] = conf.confined ? 1.0 : 0.0;
    add_trajectory(m, "attracted", t, "run from (" + tag(x0) + ", " + tag(y0) + "), a = " + tag(a));
}

// FIG8
void linear_regularized_orbits(const json& s, Measurement& m) {
    const double eps = num(s, "epsilon", 0.0025);
    const double a0 = num(s, "a_nonsliding", 0.01);
    const double a1 = num(s, "a_sliding", 2.0);
    const auto p0 = OscillatorParams::regularized(a0, eps);
    const auto fp = find_regularized_nonsliding_linear(p0);
    const double xd = find_nonsliding_period4(a0).x_star;
    m.values["x_star"] = fp.x_star;
    m.values["offset"] = std::fabs(fp.x_star - xd);
    m.values["offset_over_eps"] = std::fabs(fp.x_star - xd) / eps;
    m.values["derivative"] = fp.derivative;
    const auto r0 = regularized_return_linear(fp.x_star, p0, false);
    m.values["y_at_x4"] = eps * r0.run.trajectory.value_at(4.0);
    add_trajectory(m, "nonsliding", r0.run.trajectory, "regularized non-sliding orbit, a = " + tag(a0));
    const auto so = find_regularized_sliding_orbit_linear(OscillatorParams::regularized(a1, eps));
    m.values["sliding_x_star"] = so.x_star;
    m.values["sliding_period_error"] = so.period_error;
    m.values["sliding_captured_branch"] = so.captured_branch;
    const double xq = 22.0 / 3.0;
    if (xq > so.trajectory.x_begin() && xq < so.trajectory.x_end()) {
        m.values["sliding_v_at_22_3"] = so.trajectory.value_at(xq);
        m.values["sliding_y_at_22_3"] = eps * so.trajectory.value_at(xq);
    }
    add_trajectory(m, "sliding", so.trajectory, "regularized sliding orbit, a = " + tag(a1));
}

// FIG11
void collapse_pair(const json& s, Measurement& m) {
    const double a = num(s, "a", 0.01);
    const double eps = num(s, "epsilon", 0.0025);
    const double x_end = num(s, "x_end", 60.0);
    const auto p = OscillatorParams::regularized(a, eps);
    auto r1 = integrate_layer(SwitchingModel::Nonlinear, p, {14.1, 1.1}, x_end);
    auto r2 = integrate_layer(SwitchingModel::Nonlinear, p, {12.1, -1.1}, x_end);
    const auto c1 = detect_captures(r1.trajectory);
    const auto c2 = detect_captures(r2.trajectory);
    m.values["first_captured_branch"] = c1.empty() ? -1 : c1.front().branch;
    if (const Event* e = first_event(r1.trajectory, EventKind::LayerExit)) m.values["first_exit"] = e->x;
    if (const Event* e = first_event(r2.trajectory, EventKind::LayerEntry)) m.values["second_first_entry"] = e->x;
    m.values["second_captures"] = static_cast<double>(c2.size());
    double diff = 0.0;
    for (double x = x_end - 8.0; x <= x_end; x += 1e-3)
        diff = std::max(diff, std::fabs(r1.trajectory.value_at(x) - r2.trajectory.value_at(x)));
    m.values["late_difference"] = diff;  // sup |v1 - v2| over the last 8 units
    add_trajectory(m, "start_14.1_1.1", r1.trajectory, "start (14.1, 1.1)");
    add_trajectory(m, "start_12.1_-1.1", r2.trajectory, "start (12.1, -1.1)");
}

const std::map<std::string, std::function<void(const json&, Measurement&)>>& registry() {
    static const std::map<std::string, std::function<void(const json&, Measurement&)>> r = {
        {"x0_root", x0_root},
        {"nonsliding_orbit", nonsliding_orbit},
        {"a_zero_limit", a_zero_limit},
        {"confinement_intervals", confinement_intervals},
        {"sliding_orbit_linear", sliding_orbit_linear},
        {"nonlinear_orbit", nonlinear_orbit},
        {"fold_points", fold_points},
        {"regularized_linear", regularized_linear},
        {"exit_scaling", exit_scaling},
        {"slow_manifold_closeness", slow_manifold_closeness},
        {"collapse_run", collapse_run},
        {"vr_convergence", vr_convergence},
        {"property_suites", property_suites},
        {"linear_examples", linear_examples},
        {"linear_family", linear_family},
        {"nonlinear_branches", nonlinear_branches},
        {"nonlinear_orbits", nonlinear_orbits},
        {"linear_regularized_orbits", linear_regularized_orbits},
        {"collapse_pair", collapse_pair},
    };
    return r;
}

}  // namespace

std::vector<std::string> known_kinds() {
    std::vector<std::string> k;
    for (const auto& [name, f] : registry()) k.push_back(name);
    return k;
}

Measurement measure(const Scenario& s) {
    const auto it = registry().find(s.kind);
    if (it == registry().end()) throw DomainError("unknown scenario kind '" + s.kind + "'");
    Measurement m;
    const auto t0 = std::chrono::steady_clock::now();
    it->second(s.settings, m);
    m.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

CheckVerdict evaluate(const Check& c, const Measurement& m) {
    CheckVerdict v{c, std::numeric_limits<double>::quiet_NaN(), false, false};
    if (c.key == "runtime_s") {
        v.measured = m.runtime_s;
        v.found = true;
    } else if (const auto it = m.values.find(c.key); it != m.values.end()) {
        v.measured = it->second;
        v.found = true;
    }
    if (!v.found || std::isnan(v.measured)) return v;
    const double x = v.measured;
    if (c.kind == "abs") v.pass = std::fabs(x - c.target) <= c.tol;
    else if (c.kind == "lt") v.pass = x < c.limit;
    else if (c.kind == "le") v.pass = x <= c.limit;
    else if (c.kind == "gt") v.pass = x > c.limit;
    else if (c.kind == "ge") v.pass = x >= c.limit;
    else if (c.kind == "range") v.pass = x > c.lo && x < c.hi;
    else if (c.kind == "true") v.pass = x == 1.0;
    return v;
}

bool Report::passed() const {
    if (!error.empty()) return false;
    return std::all_of(verdicts.begin(), verdicts.end(), [](const CheckVerdict& v) { return v.pass; });
}

std::string results_csv(const Measurement& m) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : m.values) rows.push_back({k, format_number(v)});
    return table_csv({"quantity", "value"}, rows);
}

namespace {

std::string describe(const Check& c) {
    if (c.kind == "abs") return "|m - " + format_number(c.target) + "| <= " + format_number(c.tol);
    if (c.kind == "lt") return "m < " + format_number(c.limit);
    if (c.kind == "le") return "m <= " + format_number(c.limit);
    if (c.kind == "gt") return "m > " + format_number(c.limit);
    if (c.kind == "ge") return "m >= " + format_number(c.limit);
    if (c.kind == "range") return format_number(c.lo) + " < m < " + format_number(c.hi);
    return "m == 1";
}

}  // namespace

std::string format_report(const Report& r) {
    std::ostringstream o;
    o << "scenario " << r.id << '\n';
    o << "runtime_s " << format_number(r.measurement.runtime_s) << '\n';
    if (!r.error.empty()) o << "error: " << r.error << '\n';
    for (const auto& v : r.verdicts) {
        o << (v.pass ? "PASS " : "FAIL ") << v.check.name << ": measured "
          << (v.found ? format_number(v.measured) : std::string("(missing)")) << ", needs " << describe(v.check);
        if (!v.check.basis.empty()) o << " [" << v.check.basis << "]";
        o << '\n';
    }
    for (const auto& [k, v] : r.measurement.values) o << "  " << k << " = " << format_number(v) << '\n';
    for (const auto& n : r.measurement.notes) o << "note: " << n << '\n';
    for (const auto& w : r.written) o << "wrote " << w << '\n';
    o << "verdict " << (r.passed() ? "PASS" : "FAIL") << '\n';
    return o.str();
}

Report run_scenario(const Scenario& s, const std::string& out_dir) {
    Report r;
    r.id = s.id;
    try {
        r.measurement = measure(s);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    for (const auto& c : s.checks) r.verdicts.push_back(evaluate(c, r.measurement));
    if (!out_dir.empty()) {
        const fs::path dir = fs::path(out_dir) / s.id;
        fs::create_directories(dir);
        auto put = [&](const std::string& name, const std::string& text) {
            write_text_file((dir / name).string(), text);
            r.written.push_back((dir / name).string());
        };
        put("results.csv", results_csv(r.measurement));
        for (const auto& a : r.measurement.artifacts) put(a.name, a.content);
        r.written.push_back((dir / "report.txt").string());
        write_text_file((dir / "report.txt").string(), format_report(r));
    }
    return r;
}

bool SweepTable::all_passed() const {
    return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.report.passed(); });
}

std::string SweepTable::csv() const {
    std::vector<std::string> keys;
    for (const auto& p : points)
        for (const auto& [k, v] : p.report.measurement.values)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::vector<std::string> header = {parameter, "passed", "error"};
    header.insert(header.end(), keys.begin(), keys.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : points) {
        std::string err = p.report.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::vector<std::string> row = {format_number(p.value), p.report.passed() ? "1" : "0", err};
        for (const auto& k : keys) {
            const auto it = p.report.measurement.values.find(k);
            row.push_back(it == p.report.measurement.values.end() ? "" : format_number(it->second));
        }
        rows.push_back(std::move(row));
    }
    return table_csv(header, rows);
}

SweepTable sweep(const Scenario& tmpl, const std::string& parameter, const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("sweep grid is empty");
    SweepTable t;
    t.parameter = parameter;
    std::vector<std::future<Report>> fut;
    for (double v : grid) {
        Scenario s = tmpl;
        s.settings[parameter] = v;
        fut.push_back(std::async(std::launch::async, [s] { return run_scenario(s); }));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) t.points.push_back({grid[i], fut[i].get()});
    return t;
}

}  // namespace switchosc
