// One line per acceptance criterion. Tolerances and grids are pinned here, independent
// of the scenario files. Exit 0 when every criterion passes, except those named with
// --allow-fail (reported as FAIL all the same).
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "switchosc/experiments.hpp"
#include "switchosc/output.hpp"

using namespace switchosc;
using nlohmann::json;

namespace {

struct Line {
    bool pass = true;
    std::ostringstream text;

    void need(bool ok, const std::string& what) {
        pass = pass && ok;
        if (text.tellp() > 0) text << "; ";
        text << what << (ok ? "" : " [x]");
    }
};

std::string f(double v) { return format_number(v); }

Measurement run(const std::string& kind, json settings) {
    Scenario s;
    s.id = kind;
    s.kind = kind;
    s.settings = std::move(settings);
    return measure(s);
}

double val(const Measurement& m, const std::string& k) {
    const auto it = m.values.find(k);
    return it == m.values.end() ? NAN : it->second;
}

void c1(Line& l) {
    const auto m = run("x0_root", json::object());
    const double x0 = val(m, "x0");
    l.need(std::fabs(x0 - 0.6357545163) <= 1e-9, "x0 = " + f(x0) + " (0.6357545163 +- 1e-9)");
    l.need(m.runtime_s < 1.0, "runtime " + f(m.runtime_s) + " s < 1 s");
}

void c2(Line& l) {
    const auto m = run("nonsliding_orbit", {{"a", 0.01}});
    const double x = val(m, "x_star"), mu = val(m, "multiplier");
    l.need(std::fabs(x - 0.6261249968) <= 1e-8, "x* = " + f(x) + " (0.6261249968 +- 1e-8)");
    l.need(mu > 0.0 && mu < 1.0, "multiplier " + f(mu) + " in (0,1)");
    l.need(m.runtime_s < 1.0, "runtime " + f(m.runtime_s) + " s < 1 s");
}

void c3(Line& l) {
    const auto m = run("a_zero_limit", {{"a", 1e-8}, {"samples", 50}});
    const double d = val(m, "max_deviation");
    l.need(d < 1e-6, "max |P(x,1e-8) - (x+4)| = " + f(d) + " < 1e-6 over 50 midpoint samples (" +
                         f(val(m, "samples_over_bound")) + " over; max dev*x/a " + f(val(m, "max_deviation_times_x_over_a")) + ")");
}

void c4(Line& l) {
    const auto m = run("confinement_intervals", {{"a_values", {0.01, 0.1, 1.0, 10.0, 100.0}}, {"n_max", 10}});
    const double v = val(m, "violations");
    l.need(v == 0.0, "interval violations " + f(v) + " (exact membership), min margin " + f(val(m, "min_margin")));
}

void c5(Line& l) {
    const auto m = run("sliding_orbit_linear", {{"a_present", 10.0}, {"a_absent", 1e-3}});
    const double x3 = val(m, "x3"), cl = val(m, "closure_error");
    l.need(x3 > 20.0 / 3.0 && x3 < 22.0 / 3.0, "a=10 landing " + f(x3) + " in (20/3, 22/3)");
    l.need(cl <= 1e-8, "closure " + f(cl) + " <= 1e-8");
    l.need(val(m, "absent_reported") == 1.0, "a=1e-3 absence reported");
}

void c6(Line& l) {
    const auto m = run("nonlinear_orbit", {{"a_values", {0.1, 0.5, 2.0}}, {"periods", 3}});
    for (const char* a : {"0.1", "0.5", "2"}) {
        const double xa = val(m, std::string("x_a@") + a), cl = val(m, std::string("closure@") + a);
        l.need(xa > 2.0 && xa < 4.0 && cl <= 1e-12, std::string("a=") + a + ": x_a " + f(xa) + " in (2,4), closure " + f(cl));
    }
}

void c7(Line& l) {
    const auto m = run("fold_points", {{"a", 1.0}, {"a_eps", {1e-5, 1e-3}}, {"n_max", 12}});
    const double e = val(m, "max_fold_error");
    l.need(e <= 1e-10, "max |formula - bisection| = " + f(e) + " <= 1e-10");
}

void c8(Line& l) {
    const auto m = run("regularized_linear", {{"a", 0.01},
                                              {"eps_grid", {1e-2, 2.5e-3, 1e-3}},
                                              {"eps_diagnostic", {1e-4, 1e-5}},
                                              {"a_slide", 2.0},
                                              {"eps_slide", {1e-2, 1e-3}}});
    l.need(val(m, "monotone") == 1.0, "offsets " + f(val(m, "offset@0.01")) + ", " + f(val(m, "offset@0.0025")) + ", " +
                                          f(val(m, "offset@0.001")) + " monotone");
    const double p = val(m, "order");
    l.need(p >= 1.0, "empirical order " + f(p) + " >= 1 (local order at eps 1e-4..1e-5: " +
                         f(val(m, "order_local_small_eps")) + ")");
    const double drop = val(m, "contraction_drop_decades");
    l.need(drop >= 1.0, "a=2 contraction log10 " + f(val(m, "log10_contraction@0.01")) + " -> " +
                            f(val(m, "log10_contraction@0.001")) + ", drop " + f(drop) + " decades >= 1 (FD quotients " +
                            f(val(m, "fd_contraction@0.01")) + ", " + f(val(m, "fd_contraction@0.001")) + ")");
    l.need(m.runtime_s < 60.0, "runtime " + f(m.runtime_s) + " s < 60 s");
}

void c9(Line& l) {
    const auto m = run("exit_scaling", {{"a", 0.01},
                                        {"eps_grid", {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}},
                                        {"n_fixed", 10},
                                        {"n_grid", {4, 8, 16, 32}},
                                        {"eps_fixed", 1e-3}});
    const double se = val(m, "slope_eps"), sn = val(m, "slope_n");
    l.need(std::fabs(se - 2.0 / 3.0) <= 0.07, "slope_eps " + f(se) + " (2/3 +- 0.07)");
    l.need(std::fabs(sn + 1.0 / 3.0) <= 0.07, "slope_n " + f(sn) + " (-1/3 +- 0.07)");
    l.need(val(m, "r2_eps") > 0.98 && val(m, "r2_n") > 0.98, "r2 " + f(val(m, "r2_eps")) + ", " + f(val(m, "r2_n")) + " > 0.98");
    l.need(m.runtime_s < 120.0, "runtime " + f(m.runtime_s) + " s < 120 s");
}

void c10(Line& l) {
    const auto m = run("slow_manifold_closeness", {{"a", 0.01}, {"epsilon", 1e-3}, {"n_values", {6, 12, 22}}});
    for (const char* n : {"6", "12", "22"}) {
        const double r = val(m, std::string("ratio@") + n);
        l.need(r <= 1.0, std::string("n=") + n + ": sup|v-v0|/(5 eps |v1|) = " + f(r));
    }
}

void c11(Line& l) {
    const auto m = run("collapse_run", {{"a", 0.01}, {"epsilon", 0.0025}, {"x0", 14.1}, {"v0", 1.1}, {"x_end", 100.0}});
    const double b = val(m, "captured_branch"), xe = val(m, "x_e"), sl = val(m, "slid_length");
    l.need(b == 22.0, "captured on branch " + f(b));
    l.need(std::fabs(xe - 44.0) <= 0.5, "x_e " + f(xe) + " (44 +- 0.5)");
    l.need(std::fabs(sl - 29.9) <= 1.0, "slid length " + f(sl) + " (29.9 +- 1; layer residence " + f(val(m, "layer_residence")) + ")");
    l.need(val(m, "confined") == 1.0, "max v after exit " + f(val(m, "max_v_after_exit")) + " <= 1");
    l.need(m.runtime_s < 30.0, "runtime " + f(m.runtime_s) + " s < 30 s");
}

void c12(Line& l) {
    const auto m = run("vr_convergence", {{"a", 0.01}, {"epsilon", 0.0025}, {"x0", 14.1}, {"v0", 1.1}, {"n_lo", 5}, {"n_hi", 30}});
    l.need(val(m, "decreasing") == 1.0, "sup distances decrease over windows 5..30 (last " + f(val(m, "last_sup_distance")) + ")");
    const double d = val(m, "min_consecutive_distance");
    l.need(d > 1e-12, "min distance between consecutive windows " + f(d) + " > 1e-12");
}

void c13(Line& l) {
    const auto m = run("property_suites", {{"a", 0.01}, {"x_hi", 60.0}});
    const double fa = val(m, "forcing_agreement");
    l.need(fa <= 1e-12, "forcing agreement " + f(fa) + " <= 1e-12");
    l.need(val(m, "psi_cubic_valid") == 1.0, "cubic psi valid");
    const double r1 = val(m, "nullcline_residual"), r2 = val(m, "critical_manifold_residual");
    l.need(r1 < 1e-12 && r2 < 1e-12, "nullcline residuals " + f(r1) + ", " + f(r2) + " < 1e-12");
    const double h = val(m, "hybrid_vs_map");
    l.need(h <= 1e-8, "hybrid vs map " + f(h) + " <= 1e-8");
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> allowed;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--allow-fail" && i + 1 < argc) allowed.insert(std::atoi(argv[++i]));
    }
    const std::function<void(Line&)> crit[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13};
    int failed = 0, blocking = 0;
    for (int i = 0; i < 13; ++i) {
        Line l;
        try {
            crit[i](l);
        } catch (const std::exception& e) {
            l.need(false, std::string("error: ") + e.what());
        }
        std::printf("criterion %d: %s  %s\n", i + 1, l.pass ? "PASS" : "FAIL", l.text.str().c_str());
        std::fflush(stdout);
        if (!l.pass) {
            ++failed;
            if (!allowed.count(i + 1)) ++blocking;
        }
    }
    std::printf("%d of 13 criteria pass", 13 - failed);
    if (failed > blocking) std::printf(" (%d known failure%s allowed)", failed - blocking, failed - blocking > 1 ? "s" : "");
    std::printf("\n");
    return blocking == 0 ? 0 : 1;
}
