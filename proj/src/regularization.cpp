#include "switchosc/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "switchosc/errors.hpp"
#include "switchosc/poincare.hpp"
#include "switchosc/transition.hpp"

namespace switchosc {

double CriticalBranchReg::v0(double x) const {
    if (!branch.contains(x)) throw DomainError("x outside the sliding branch");
    return params->transition().inverse(branch.lambda(x));
}

double CriticalBranchReg::dv0(double x) const {
    const double v = v0(x);
    return branch.dlambda(x) / params->transition().psi_prime(v);
}

double CriticalBranchReg::normal_rate(double x) const {
    const double v = v0(x);
    return -dforcing_dlambda(branch.model, x, branch.lambda(x), *params) * params->transition().psi_prime(v);
}

double CriticalBranchReg::v1(double x) const {
    const double v = v0(x);
    const double pp = params->transition().psi_prime(v);
    const double fl = dforcing_dlambda(branch.model, x, branch.lambda(x), *params);
    if (std::fabs(fl * pp) < 1e-300) throw DomainError("slow manifold degenerate at a fold");
    return -(dv0(x) + params->a * v) / (fl * pp);
}

CriticalBranchReg critical_branch_reg(SwitchingModel m, int index, const OscillatorParams& p) {
    return {make_branch(m, index), &p};
}

double critical_branch(SwitchingModel m, int index, double x, const OscillatorParams& p) {
    return critical_branch_reg(m, index, p).v0(x);
}

double fold_point(Side s, int n, const OscillatorParams& p) {
    if (!(p.epsilon > 0.0)) throw DomainError("fold points need epsilon > 0");
    if (p.a * p.epsilon >= 1.0) throw DomainError("fold points need a*eps < 1");
    const double w = p.omega(s).value();
    const double sgn = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
    const double shift = sgn * std::asin(p.a * p.epsilon) / (kPi * w);
    return n / w + (s == Side::Plus ? shift : -shift);
}

SlowManifoldValue slow_manifold_expansion(int n, double x, const OscillatorParams& p) {
    if (n < 1) throw DomainError("half index must be positive");
    if (!(p.epsilon > 0.0)) throw DomainError("slow manifold needs epsilon > 0");
    const auto c = critical_branch_reg(SwitchingModel::Nonlinear, 2 * n, p);
    SlowManifoldValue r;
    r.v0 = c.v0(x);
    if (p.transition().psi_prime(r.v0) <= 0.1) throw DomainError("too close to the fold for the expansion");
    r.v1 = c.v1(x);
    r.v = r.v0 + p.epsilon * r.v1;
    return r;
}

ExitMeasurement measure_exit_point(int n, const OscillatorParams& p, const LayerOptions& opt_in) {
    p.validate_regularized();
    const int N = 2 * n;
    ExitMeasurement out;
    out.x_start = 2.5 * n;
    out.x_fold = fold_point(Side::Minus, N, p);
    const auto sm = slow_manifold_expansion(n, out.x_start, p);
    LayerOptions opt = opt_in;
    opt.stop_on_exit = true;
    const double x_end = out.x_fold + 1.5;
    const auto run = integrate_layer(SwitchingModel::Nonlinear, p, {out.x_start, sm.v}, x_end, opt);
    const auto c = critical_branch_reg(SwitchingModel::Nonlinear, N, p);
    for (double x = out.x_start + 0.05; x <= out.x_start + 0.55; x += 0.05) {
        const double v = run.trajectory.value_at(x);
        if (std::fabs(v - c.v0(x)) > 5.0 * p.epsilon * std::fabs(c.v1(x)) + 1e-9)
            throw SolverError("start point was not captured by the slow manifold");
    }
    const Event* exit = nullptr;
    for (const auto& e : run.trajectory.events())
        if (e.kind == EventKind::LayerExit) { exit = &e; break; }
    if (!exit || run.final_state.v != -1.0) throw NoRootError("no exit through v = -1 before x_fold + 1.5");
    out.x_e = exit->x;
    out.deviation = out.x_e - out.x_fold;
    return out;
}

ExitScaling exit_scaling_fit(double a, const std::vector<double>& eps_grid, int n_fixed,
                             const std::vector<int>& n_grid, double eps_fixed) {
    auto launch = [a](int n, double eps) {
        return std::async(std::launch::async, [a, n, eps] {
            return ExitScalingPoint{n, eps, measure_exit_point(n, OscillatorParams::regularized(a, eps))};
        });
    };
    std::vector<std::future<ExitScalingPoint>> fe, fn;
    for (double e : eps_grid) fe.push_back(launch(n_fixed, e));
    for (int n : n_grid) fn.push_back(launch(n, eps_fixed));
    ExitScaling out;
    std::vector<std::pair<double, double>> se, sn;
    auto admissible = [a](const ExitScalingPoint& q) { return q.n >= 3 && a * q.epsilon <= 0.01; };
    for (auto& f : fe) {
        out.eps_points.push_back(f.get());
        const auto& q = out.eps_points.back();
        if (admissible(q)) se.emplace_back(q.epsilon, q.m.deviation);
    }
    for (auto& f : fn) {
        out.n_points.push_back(f.get());
        const auto& q = out.n_points.back();
        if (admissible(q)) sn.emplace_back(static_cast<double>(q.n), q.m.deviation);
    }
    out.fit_eps = fit_power_law(se, 2.0);
    out.fit_n = fit_power_law(sn, 0.9);
    return out;
}

double boundary_return_map(Side s, double x_start, const OscillatorParams& p) {
    p.validate_regularized();
    const double y = sign_of(s) * p.epsilon;
    const HalfPlaneArc arc{s, x_start, y};
    if (sign_of(s) * arc.slope(x_start, p) < -1e-9) throw DomainError("flow enters the layer at this point");
    CrossingSearchOptions copt;
    copt.tol = 1e-13;
    const auto c = first_level_crossing(arc, y, p, copt, sign_of(s));
    if (!c) throw NoRootError("exterior arc does not return to the layer boundary");
    return c->x;
}

RegularizedReturn regularized_return_linear(double x, const OscillatorParams& p, bool allow_capture,
                                            const LayerOptions& opt) {
    const auto F = [&](double xx) { return layer_field(SwitchingModel::Linear, p, {xx, 0.0}).second; };
    if (!(F(x) < 0.0)) throw DomainError("section point must move downward");
    RegularizedReturn r;
    r.run = integrate_layer(SwitchingModel::Linear, p, {x, 0.0}, x + 8.0, opt, SectionEvent{0.0, -1, x + 1.0});
    if (!r.run.stopped_on_section) throw NoRootError("no return to the section within 8");
    if (!allow_capture) {
        for (const auto& s : r.run.trajectory.segments())
            if (s.mode == Mode::Layer && s.x_end() - s.x_begin() > 0.5) throw CapturedError("captured in the layer");
    }
    r.x_next = r.run.final_state.x;
    r.log_derivative = std::log(std::fabs(F(x) / F(r.x_next))) + r.run.log_sensitivity;
    r.derivative = std::exp(r.log_derivative);
    return r;
}

double regularized_poincare_linear(double x, const OscillatorParams& p) {
    return regularized_return_linear(x, p, false).x_next;
}

RegularizedFixedPoint find_regularized_nonsliding_linear(const OscillatorParams& p) {
    p.validate_regularized();
    const double x_d = find_nonsliding_period4(p.a).x_star;
    auto delta = [&](double x) { return regularized_poincare_linear(x, p) - x - 4.0; };
    double d = std::max(20.0 * p.epsilon, 1e-3);
    double lo = 0.0, hi = 0.0, flo = 0.0, fhi = 0.0;
    for (int k = 0;; ++k) {
        if (k > 12) throw NoRootError("no sign change around the discontinuous fixed point");
        lo = std::max(1e-6, x_d - d);
        hi = std::min(2.0 / 3.0 - 1e-6, x_d + d);
        flo = delta(lo);
        fhi = delta(hi);
        if (flo * fhi <= 0.0) break;
        d *= 2.0;
    }
    // Illinois false position on the bracket [lo, hi]
    int last = 0;
    double x = lo;
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        x = (lo * fhi - hi * flo) / (fhi - flo);
        const double fx = delta(x);
        if (fx == 0.0 || std::fabs(fx) < 1e-13) break;
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x; flo = fx;
            if (last == -1) fhi *= 0.5;
            last = -1;
        } else {
            hi = x; fhi = fx;
            if (last == 1) flo *= 0.5;
            last = 1;
        }
    }
    const auto r = regularized_return_linear(x, p, false);
    return {x, r.derivative, std::fabs(r.x_next - x - 4.0)};
}

RegularizedSlidingOrbit find_regularized_sliding_orbit_linear(const OscillatorParams& p) {
    p.validate_regularized();
    double x = find_sliding_period4_linear(p.a).x1;
    RegularizedSlidingOrbit out;
    double step = 1.0;
    for (int it = 0; it < 40 && step > 1e-13; ++it) {
        const double xn = regularized_return_linear(x, p, true).x_next - 4.0;
        step = std::fabs(xn - x);
        x = xn;
    }
    auto r = regularized_return_linear(x, p, true);
    out.x_star = x;
    out.period_error = std::fabs(r.x_next - x - 4.0);
    out.contraction = r.derivative;
    out.log10_contraction = r.log_derivative / std::log(10.0);
    const double h = out.fd_step;
    out.contraction_fd = (regularized_return_linear(x + h, p, true).x_next -
                          regularized_return_linear(x - h, p, true).x_next) / (2.0 * h);
    out.trajectory = std::move(r.run.trajectory);
    const auto caps = detect_captures(out.trajectory, 0.2);
    if (!caps.empty()) out.captured_branch = caps.front().branch;
    return out;
}

double VrReference::value(double x) const {
    const double k = std::floor((x - x_fold) / (x_next_fold - x_fold));
    const double xr = x - k * (x_next_fold - x_fold);
    if (xr < x_reentry) return arc.value(xr, params) / params.epsilon;
    return -1.0;
}

VrReference v_r_reference(int n, const OscillatorParams& p) {
    p.validate_regularized();
    if (n < 1) throw DomainError("half index must be positive");
    VrReference r;
    r.params = p;
    r.x_fold = fold_point(Side::Minus, 2 * n, p);
    r.x_next_fold = fold_point(Side::Minus, 2 * n + 2, p);
    r.arc = HalfPlaneArc{Side::Minus, r.x_fold, -p.epsilon};
    r.x_reentry = boundary_return_map(Side::Minus, r.x_fold, p);
    return r;
}

std::vector<WindowDistance> convergence_to_vr(const Trajectory& t, int n_lo, int n_hi, double grid) {
    if (!t.layer_scaled()) throw DomainError("convergence check needs a layer-scaled trajectory");
    std::vector<WindowDistance> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        const auto ref = v_r_reference(n, t.params());
        const double lo = ref.x_fold, hi = ref.x_next_fold;
        if (lo < t.x_begin() || hi > t.x_end()) throw DomainError("trajectory does not cover the window");
        WindowDistance w{n, lo, 0.0, std::numeric_limits<double>::quiet_NaN()};
        const bool next = hi + (hi - lo) <= t.x_end();
        if (next) w.distance_to_next = 0.0;
        const int m = static_cast<int>(std::ceil((hi - lo) / grid));
        for (int i = 0; i <= m; ++i) {
            const double x = lo + (hi - lo) * i / m;
            const double v = t.value_at(x);
            w.sup_distance = std::max(w.sup_distance, std::fabs(v - ref.value(x)));
            if (next) w.distance_to_next = std::max(w.distance_to_next, std::fabs(v - t.value_at(x + hi - lo)));
        }
        rows.push_back(w);
    }
    return rows;
}

namespace {

int candidate_branch(SwitchingModel m, const OscillatorParams& p, double x, double v) {
    if (std::fabs(v) >= 1.0) return -1;
    int n = -1;
    if (m == SwitchingModel::Nonlinear) {
        const double lam = p.transition().psi(v);
        n = static_cast<int>(std::lround(x * (1.0 + 0.5 * lam)));
        if (n < 1) return -1;
    } else {
        n = static_cast<int>(std::floor((x - 2.0 / 3.0) / 2.0));
        if (n < 0) return -1;
    }
    const auto b = make_branch(m, n);
    if (!b.contains(x) || b.stability() != FastStability::Attracting) return -1;
    return n;
}

}  // namespace

std::vector<CaptureRun> detect_captures(Trajectory& t, double min_length) {
    if (!t.layer_scaled()) throw DomainError("capture detection needs a layer-scaled trajectory");
    const auto& p = t.params();
    std::vector<CaptureRun> runs;
    for (auto& seg : t.mutable_segments()) {
        if (seg.mode != Mode::Layer) continue;
        int cur = -1;
        double from = 0.0, last = 0.0;
        auto flush = [&] {
            if (cur >= 0 && last - from >= min_length) {
                runs.push_back({cur, from, last});
                seg.branch = cur;
            }
            cur = -1;
        };
        for (const auto& s : seg.samples) {
            int b = candidate_branch(t.model(), p, s.x, s.y);
            if (b >= 0) {
                const auto c = critical_branch_reg(t.model(), b, p);
                const double v0 = c.v0(s.x);
                if (p.transition().psi_prime(v0) < 1e-3 ||
                    std::fabs(s.y - v0) >= 5.0 * p.epsilon * std::fabs(c.v1(s.x)) + 1e-9)
                    b = -1;
            }
            if (b != cur) {
                flush();
                if (b >= 0) { cur = b; from = s.x; }
            }
            if (b >= 0) last = s.x;
        }
        flush();
    }
    return runs;
}

}  // namespace switchosc
