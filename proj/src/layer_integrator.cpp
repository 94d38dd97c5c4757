#include "switchosc/layer_integrator.hpp"

#include <algorithm>
#include <cmath>

#include "switchosc/errors.hpp"
#include "switchosc/transition.hpp"

namespace switchosc {

namespace {

// Hairer-Wanner SDIRK, order 4, L-stable, stiffly accurate; embedded order 3.
constexpr double kGamma = 0.25;
constexpr double kC[5] = {0.25, 0.75, 11.0 / 20.0, 0.5, 1.0};
constexpr double kA[5][5] = {
    {0.25, 0, 0, 0, 0},
    {0.5, 0.25, 0, 0, 0},
    {17.0 / 50.0, -1.0 / 25.0, 0.25, 0, 0},
    {371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0},
    {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25},
};
constexpr double kB[5] = {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25};
constexpr double kBhat[5] = {59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0};

struct Rhs {
    SwitchingModel m;
    const OscillatorParams& p;
    const TransitionFunction& psi;
    double eps;

    double f(double x, double v) const {
        return -p.a * v - forcing(m, x, psi.psi(v), p) / eps;
    }
    double jac(double x, double v) const {
        const double dpsi = psi.psi_prime(v);
        if (dpsi == 0.0) return -p.a;
        return -p.a - dforcing_dlambda(m, x, psi.psi(v), p) * dpsi / eps;
    }
    double dfdl_bound(double x) const {
        if (m == SwitchingModel::Linear) return 1.0;
        return 0.5 * kPi * std::fabs(x) * std::fabs(p.omega_plus.value() - p.omega_minus.value());
    }
};

struct StepResult {
    bool ok = false;
    double v = 0.0;
    double err = 0.0;
    double int_jac = 0.0;
};

StepResult sdirk_step(const Rhs& r, double x, double v, double h) {
    StepResult out;
    double k[5];
    double z_prev = v;
    for (int i = 0; i < 5; ++i) {
        double base = v;
        for (int j = 0; j < i; ++j) base += h * kA[i][j] * k[j];
        const double xi = x + kC[i] * h;
        const double hg = h * kGamma;
        double z = (i == 0) ? v : z_prev;
        bool conv = false;
        for (int it = 0; it < 12; ++it) {
            const double res = z - base - hg * r.f(xi, z);
            const double d = 1.0 - hg * r.jac(xi, z);
            if (!(d > 0.0) && !(d < 0.0)) return out;
            const double dz = res / d;
            z -= dz;
            if (!std::isfinite(z)) return out;
            if (std::fabs(dz) <= 1e-14 * (1.0 + std::fabs(z))) {
                conv = true;
                break;
            }
        }
        if (!conv) return out;
        k[i] = (z - base) / hg;
        out.int_jac += h * kB[i] * r.jac(xi, z);
        z_prev = z;
    }
    out.v = z_prev;
    double e = 0.0;
    for (int i = 0; i < 5; ++i) e += (kB[i] - kBhat[i]) * k[i];
    // stiff filter: (1 - h gamma J)^-1 applied to the raw estimate
    out.err = std::fabs(h * e) / std::fabs(1.0 - h * kGamma * r.jac(x, v));
    out.ok = true;
    return out;
}

bool leaves_layer(const Rhs& r, double x, double v) {
    const int s = v > 0.0 ? 1 : -1;
    const double F = r.f(x, v);
    if (std::fabs(F) > 1e-10 / r.eps) return s * F > 0.0;
    return s * r.f(x + 1e-9, v) > 0.0;
}

}  // namespace

std::pair<double, double> layer_field(SwitchingModel m, const OscillatorParams& p, const LayerState& s) {
    if (!(p.epsilon > 0.0)) throw DomainError("layer field needs epsilon > 0");
    const Rhs r{m, p, p.transition(), p.epsilon};
    return {1.0, r.f(s.x, s.v)};
}

double layer_jacobian(SwitchingModel m, const OscillatorParams& p, double x, double v) {
    if (!(p.epsilon > 0.0)) throw DomainError("layer field needs epsilon > 0");
    const Rhs r{m, p, p.transition(), p.epsilon};
    return r.jac(x, v);
}

LayerRun integrate_layer(SwitchingModel m, const OscillatorParams& p, LayerState init, double x_end,
                         const LayerOptions& opt, std::optional<SectionEvent> section) {
    p.validate_regularized();
    if (!(x_end > init.x)) throw DomainError("x_end must exceed the initial x");
    const double eps = p.epsilon;
    const Rhs r{m, p, p.transition(), eps};

    LayerRun run;
    run.trajectory = Trajectory(m, p, true);
    Trajectory& traj = run.trajectory;
    traj.add_event({init.x, EventKind::Start, -1});

    double x = init.x, v = init.v;
    double h = opt.fast_step_factor * eps / std::max(1.0, r.dfdl_bound(x));
    CrossingSearchOptions copt;
    copt.tol = 1e-13;

    while (x < x_end) {
        const bool outside = std::fabs(v) > 1.0 || (std::fabs(v) == 1.0 && leaves_layer(r, x, v));
        if (outside) {
            const Side side = v > 0.0 ? Side::Plus : Side::Minus;
            const double level = sign_of(side) * eps;
            const HalfPlaneArc arc{side, x, v * eps};
            const int depart = std::fabs(v) == 1.0 ? sign_of(side) : 0;
            const auto c = first_level_crossing(arc, level, p, copt, depart);
            const bool hit = c && c->x < x_end;
            const double x_stop = hit ? c->x : x_end;
            auto seg = sample_arc(arc, x_stop, p, opt.sample_dx, eps);
            if (hit) seg.samples.back().y = sign_of(side);
            traj.add_segment(std::move(seg));
            run.log_sensitivity += -p.a * (x_stop - x);
            if (!hit) {
                x = x_end;
                v = arc.value(x_end, p) / eps;
                break;
            }
            x = c->x;
            v = sign_of(side);
            traj.add_event({x, EventKind::LayerEntry, -1});
            h = opt.fast_step_factor * eps / std::max(1.0, r.dfdl_bound(x));
            continue;
        }

        // inside the layer
        Segment seg;
        seg.mode = Mode::Layer;
        seg.samples.push_back({x, v, r.f(x, v)});
        bool exited = false, sectioned = false;
        while (x < x_end) {
            if (++run.steps > opt.max_steps) throw SolverError("layer integration step limit reached");
            const double F = r.f(x, v);
            const double J = r.jac(x, v);
            const double fast_cap = opt.fast_step_factor * eps / std::max(1.0, r.dfdl_bound(x));
            const bool slow = J < -2.0 / opt.slow_max_step && std::fabs(F) < 20.0;
            const double cap = slow ? opt.slow_max_step : fast_cap;
            const double hh = std::min({h, cap, x_end - x});
            if (hh < 1e-15 * std::max(1.0, std::fabs(x))) throw SolverError("layer integration step underflow");
            const auto st = sdirk_step(r, x, v, hh);
            if (!st.ok) {
                h = hh * 0.25;
                ++run.rejected;
                continue;
            }
            const double errn = st.err / (opt.tol * hh + opt.abs_floor * (1.0 + std::fabs(v)));
            if (errn > 1.0) {
                h = hh * std::max(0.1, 0.9 * std::pow(errn, -1.0 / 3.0));
                ++run.rejected;
                continue;
            }
            // events within the step
            auto exit_hit = [&](double vv) { return std::fabs(vv) > 1.0; };
            auto section_hit = [&](double xv, double vv) {
                if (!section || xv < section->x_min) return false;
                return (vv - section->level) * section->direction >= 0.0 &&
                       (v - section->level) * section->direction < 0.0;
            };
            const bool ev_exit = exit_hit(st.v);
            const bool ev_sec = section_hit(x + hh, st.v);
            if (ev_exit || ev_sec) {
                double lo = 0.0, hi = hh;
                StepResult at_hi = st;
                while (hi - lo > opt.event_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const auto sm = sdirk_step(r, x, v, mid);
                    if (!sm.ok) throw SolverError("event location failed");
                    if (exit_hit(sm.v) || section_hit(x + mid, sm.v)) {
                        hi = mid;
                        at_hi = sm;
                    } else {
                        lo = mid;
                    }
                }
                const bool is_exit = exit_hit(at_hi.v);
                x += hi;
                v = is_exit ? (at_hi.v > 0.0 ? 1.0 : -1.0) : section->level;
                run.log_sensitivity += at_hi.int_jac;
                seg.samples.push_back({x, v, r.f(x, v)});
                if (is_exit) exited = true; else sectioned = true;
                break;
            }
            x += hh;
            v = st.v;
            run.log_sensitivity += st.int_jac;
            seg.samples.push_back({x, v, r.f(x, v)});
            h = hh * std::min(4.0, std::max(0.2, errn > 0.0 ? 0.9 * std::pow(errn, -1.0 / 3.0) : 4.0));
        }
        traj.add_segment(std::move(seg));
        if (exited) {
            traj.add_event({x, EventKind::LayerExit, -1});
            if (opt.stop_on_exit) break;
        }
        if (sectioned) {
            run.stopped_on_section = true;
            break;
        }
    }
    run.final_state = {x, v};
    traj.add_event({x, EventKind::End, -1});
    return run;
}

}  // namespace switchosc
