#include "switchosc/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "switchosc/errors.hpp"
#include "switchosc/poincare.hpp"

namespace switchosc {

std::string_view to_string(FastStability s) {
    return s == FastStability::Attracting ? "attracting" : "repelling";
}

std::string_view to_string(PeriodicityVerdict v) {
    switch (v) {
        case PeriodicityVerdict::Periodic: return "periodic";
        case PeriodicityVerdict::UnverifiedAtThreshold: return "unverified at threshold";
        case PeriodicityVerdict::Aperiodic: return "aperiodic";
    }
    return "?";
}

double SlidingBranch::lambda(double x) const {
    if (model == SwitchingModel::Linear) return -1.0 - 1.0 / cos_pi(x);
    return 2.0 * (n / x - 1.0);
}

double SlidingBranch::dlambda(double x) const {
    if (model == SwitchingModel::Linear) {
        const double c = cos_pi(x);
        return -kPi * sin_pi(x) / (c * c);
    }
    return -2.0 * n / (x * x);
}

FastStability SlidingBranch::stability() const {
    // attracting iff df/dlambda > 0 on the branch
    if (model == SwitchingModel::Linear) {
        return (n % 2 != 0) ? FastStability::Attracting : FastStability::Repelling;
    }
    return (n % 2 == 0) ? FastStability::Attracting : FastStability::Repelling;
}

SlidingBranch make_branch(SwitchingModel m, int n) {
    if (m == SwitchingModel::Linear) return {m, n, 2.0 / 3.0 + 2.0 * n, 4.0 / 3.0 + 2.0 * n};
    if (n < 1) throw DomainError("nonlinear branch index must be >= 1");
    return {m, n, 2.0 * n / 3.0, 2.0 * n};
}

std::vector<SlidingBranch> linear_branches(double x_lo, double x_hi) {
    if (x_hi < x_lo) throw DomainError("empty x range");
    std::vector<SlidingBranch> out;
    const int n0 = static_cast<int>(std::floor((x_lo - 4.0 / 3.0) / 2.0));
    const int n1 = static_cast<int>(std::ceil((x_hi - 2.0 / 3.0) / 2.0));
    for (int n = n0; n <= n1; ++n) {
        auto b = make_branch(SwitchingModel::Linear, n);
        if (b.lo < x_hi && b.hi > x_lo) out.push_back(b);
    }
    return out;
}

std::vector<SlidingBranch> nonlinear_branches(double x_lo, double x_hi) {
    if (x_hi < x_lo) throw DomainError("empty x range");
    std::vector<SlidingBranch> out;
    const int n0 = std::max(1, static_cast<int>(std::floor(x_lo / 2.0)));
    const int n1 = static_cast<int>(std::ceil(1.5 * x_hi));
    for (int n = n0; n <= n1; ++n) {
        auto b = make_branch(SwitchingModel::Nonlinear, n);
        if (b.lo < x_hi && b.hi > x_lo) out.push_back(b);
    }
    return out;
}

std::vector<SlidingBranch> branches(SwitchingModel m, double x_lo, double x_hi) {
    return m == SwitchingModel::Linear ? linear_branches(x_lo, x_hi) : nonlinear_branches(x_lo, x_hi);
}

BranchSelection select_branch_on_entry(SwitchingModel m, double x, Side from_side, int exclude) {
    constexpr double kFoldTol = 1e-12;
    BranchSelection out;
    if (m == SwitchingModel::Linear) {
        const int n = static_cast<int>(std::floor((x - 2.0 / 3.0) / 2.0));
        for (int k : {n, n + 1}) {
            if (k == exclude) continue;
            const auto b = make_branch(m, k);
            if (x < b.lo - kFoldTol || x > b.hi + kFoldTol) continue;
            const double lam = b.lambda(x);
            if (std::fabs(lam) >= 1.0 - kFoldTol || !b.contains(x)) {
                out.kind = BranchSelection::Kind::Fold;
                out.branch = b;
                out.lambda = std::clamp(lam, -1.0, 1.0);
                return out;
            }
            out.kind = BranchSelection::Kind::Branch;
            out.branch = b;
            out.lambda = lam;
            return out;
        }
        return out;
    }
    // roots lambda_k = 2(k/x - 1) in [-1, 1]  <=>  k in [x/2, 3x/2]
    const double kmin = 0.5 * x, kmax = 1.5 * x;
    const bool from_above = from_side == Side::Plus;
    int k = from_above ? static_cast<int>(std::floor(kmax + 1e-12)) : static_cast<int>(std::ceil(kmin - 1e-12));
    for (int guard = 0; guard < 4; ++guard, k += from_above ? -1 : 1) {
        if (k < 1 || k < kmin - 1e-12 || k > kmax + 1e-12) return out;
        if (k == exclude) continue;
        const auto b = make_branch(m, k);
        const double lam = b.lambda(x);
        out.branch = b;
        out.lambda = std::clamp(lam, -1.0, 1.0);
        out.kind = std::fabs(lam) >= 1.0 - kFoldTol ? BranchSelection::Kind::Fold : BranchSelection::Kind::Branch;
        return out;
    }
    return out;
}

namespace {

void add_sliding_segment(Trajectory& t, double x0, double x1, int branch, double dx) {
    Segment s;
    s.mode = Mode::Sliding;
    s.branch = branch;
    const int n = std::max(1, static_cast<int>(std::ceil((x1 - x0) / dx)));
    for (int k = 0; k <= n; ++k) {
        const double x = (k == n) ? x1 : x0 + (x1 - x0) * k / n;
        s.samples.push_back({x, 0.0, 0.0});
    }
    t.add_segment(std::move(s));
}

double threshold_field(SwitchingModel m, const OscillatorParams& p, double x, Side s) {
    return -forcing(m, x, sign_of(s), p);
}

}  // namespace

Trajectory simulate_discontinuous(SwitchingModel m, const OscillatorParams& p, const HybridState& init,
                                  double x_end, const DiscontinuousOptions& opt) {
    p.validate();
    if (p.epsilon != 0.0) throw DomainError("discontinuous simulation needs epsilon = 0");
    if (!(x_end > init.x)) throw DomainError("x_end must exceed the initial x");

    Trajectory traj(m, p, false);
    traj.add_event({init.x, EventKind::Start, -1});

    double x = init.x, y = init.y;
    Mode mode = init.mode;
    Side side = Side::Plus;
    std::optional<SlidingBranch> br;

    if (mode == Mode::Layer) throw DomainError("layer states need the regularized integrator");
    if (y != 0.0) {
        side = y > 0.0 ? Side::Plus : Side::Minus;
        if (mode == Mode::Sliding || (mode != flow_mode(side) && mode != Mode::FlowPlus && mode != Mode::FlowMinus))
            throw DomainError("sliding state needs y = 0");
        if (mode != flow_mode(side)) throw DomainError("mode inconsistent with the sign of y");
    } else if (mode == Mode::FlowPlus || mode == Mode::FlowMinus) {
        side = mode == Mode::FlowPlus ? Side::Plus : Side::Minus;
        if (!departure_consistent(side, x, p))
            throw DomainError("field does not allow departure into the requested half-plane");
    } else {
        if (init.branch >= 0) {
            br = make_branch(m, init.branch);
            if (!br->contains(x)) throw DomainError("initial x outside the requested branch");
        } else {
            const double up = threshold_field(m, p, x, Side::Plus);
            const double dn = threshold_field(m, p, x, Side::Minus);
            if (up > 0.0 && dn > 0.0) { mode = Mode::FlowPlus; side = Side::Plus; }
            else if (up < 0.0 && dn < 0.0) { mode = Mode::FlowMinus; side = Side::Minus; }
            else if (up < 0.0 && dn > 0.0) {
                std::vector<SlidingBranch> cand;
                for (const auto& b : branches(m, x, x))
                    if (b.contains(x) && b.stability() == FastStability::Attracting) cand.push_back(b);
                if (cand.size() != 1) throw DomainError("ambiguous threshold start: give a branch id");
                br = cand.front();
            } else {
                throw DomainError("ambiguous threshold start on a repelling or tangency point");
            }
        }
        if (br) mode = Mode::Sliding;
    }
    if (mode == Mode::Sliding) traj.add_event({x, EventKind::SlideEntry, br->n});

    CrossingSearchOptions copt;
    copt.tol = opt.tol;
    std::size_t events = 0;
    while (x < x_end) {
        if (++events > opt.max_events) throw SolverError("event limit reached");
        if (mode == Mode::FlowPlus || mode == Mode::FlowMinus) {
            const HalfPlaneArc arc{side, x, y};
            const int depart = y == 0.0 ? sign_of(side) : 0;
            const auto c = first_level_crossing(arc, 0.0, p, copt, depart);
            const bool hit = c && c->x < x_end;
            const double x_stop = hit ? c->x : x_end;
            auto seg = sample_arc(arc, x_stop, p, opt.sample_dx);
            if (hit) seg.samples.back().y = 0.0;
            traj.add_segment(std::move(seg));
            if (!hit) { x = x_end; break; }
            x = c->x;
            y = 0.0;
            if (c->grazing) {
                traj.add_event({x, EventKind::Fold, -1});
                if (departure_consistent(side, x, p)) continue;
            }
            const auto sel = select_branch_on_entry(m, x, side);
            if (sel.kind == BranchSelection::Kind::Branch) {
                br = sel.branch;
                mode = Mode::Sliding;
                traj.add_event({x, EventKind::SlideEntry, br->n});
                continue;
            }
            const Side other = opposite(side);
            if (!departure_consistent(other, x, p))
                throw SolverError("threshold contact neither crosses nor slides");
            traj.add_event({x, sel.kind == BranchSelection::Kind::Fold ? EventKind::Fold : EventKind::Cross, -1});
            side = other;
            mode = flow_mode(side);
            continue;
        }
        // sliding
        const double hi = br->hi;
        if (x_end <= hi) {
            add_sliding_segment(traj, x, x_end, br->n, opt.sample_dx);
            x = x_end;
            break;
        }
        add_sliding_segment(traj, x, hi, br->n, opt.sample_dx);
        traj.add_event({hi, EventKind::SlideExit, br->n});
        x = hi;
        y = 0.0;
        const Side exit_side = br->lambda(hi) > 0.0 ? Side::Plus : Side::Minus;
        if (departure_consistent(exit_side, x, p)) {
            side = exit_side;
            mode = flow_mode(side);
            continue;
        }
        const auto sel = select_branch_on_entry(m, x, exit_side, br->n);
        if (sel.kind == BranchSelection::Kind::Branch) {
            br = sel.branch;
            traj.add_event({x, EventKind::SlideEntry, br->n});
            continue;
        }
        if (!departure_consistent(opposite(exit_side), x, p))
            throw SolverError("sliding exit without an admissible continuation");
        side = opposite(exit_side);
        mode = flow_mode(side);
    }
    traj.add_event({x, EventKind::End, -1});
    return traj;
}

SlidingOrbitLinear find_sliding_period4_linear(double a, double tol) {
    const auto p = OscillatorParams::discontinuous(a);
    SlidingOrbitLinear out;
    const double start = 10.0 / 3.0;
    out.x1 = next_crossing(Side::Plus, start, p).x_next;
    out.x2 = next_crossing(Side::Minus, out.x1, p).x_next;
    out.x3 = next_crossing(Side::Plus, out.x2, p).x_next;
    if (!(out.x3 > 20.0 / 3.0 && out.x3 < 22.0 / 3.0))
        throw NoRootError("no sliding period-4 orbit: landing point outside (20/3, 22/3)");
    out.trajectory = simulate_discontinuous(SwitchingModel::Linear, p, {start, 0.0, Mode::FlowPlus, -1},
                                            start + 8.5);
    std::vector<double> xs;
    for (const auto& e : out.trajectory.events())
        if (e.kind == EventKind::Cross || e.kind == EventKind::SlideEntry || e.kind == EventKind::SlideExit)
            xs.push_back(e.x);
    if (xs.size() < 8) throw SolverError("hybrid simulation did not complete two periods");
    const double expected[4] = {out.x1, out.x2, out.x3, start + 4.0};
    double err = 0.0;
    for (std::size_t k = 0; k < 8; ++k) err = std::max(err, std::fabs(xs[k] - expected[k % 4] - 4.0 * (k / 4)));
    out.closure_error = err;
    if (err > tol) throw SolverError("sliding orbit does not close within tolerance");
    return out;
}

SlidingOrbitNonlinear find_sliding_period4_nonlinear(double a, int periods) {
    if (periods < 1) throw DomainError("periods must be >= 1");
    const auto p = OscillatorParams::discontinuous(a);
    SlidingOrbitNonlinear out;
    out.x_a = next_crossing(Side::Minus, 0.0, p).x_next;
    if (!(out.x_a > 2.0 && out.x_a < 4.0)) throw SolverError("x_a outside (2, 4)");
    out.trajectory = simulate_discontinuous(SwitchingModel::Nonlinear, p, {0.0, 0.0, Mode::FlowMinus, -1},
                                            4.0 * periods);
    int k_entry = 0, k_exit = 0;
    double err = 0.0;
    for (const auto& e : out.trajectory.events()) {
        if (e.kind == EventKind::SlideEntry) {
            err = std::max(err, std::fabs(e.x - (4.0 * k_entry + out.x_a)));
            if (e.branch != 2 * (k_entry + 1)) err = std::max(err, 1.0);
            ++k_entry;
        } else if (e.kind == EventKind::SlideExit) {
            ++k_exit;
            err = std::max(err, std::fabs(e.x - 4.0 * k_exit));
        } else if (e.kind == EventKind::Cross || e.kind == EventKind::Fold) {
            err = std::max(err, 1.0);
        }
    }
    if (k_entry != periods) err = std::max(err, 1.0);
    out.closure_error = err;
    double ymax = -1e300;
    for (const auto& s : out.trajectory.segments())
        for (const auto& q : s.samples) ymax = std::max(ymax, q.y);
    out.max_y = ymax;
    return out;
}

NonslidingExclusionReport check_no_nonsliding_periodic_nonlinear(double a, int n_max) {
    const auto p = OscillatorParams::discontinuous(a);
    NonslidingExclusionReport rep;
    for (int n = 1; n <= n_max; ++n) {
        NonslidingExclusionRow r;
        r.n = n;
        r.plus_landing = next_crossing(Side::Plus, 4.0 * n - 2.0, p).x_next;
        r.plus_margin = std::min(r.plus_landing - (4.0 * n - 4.0 / 3.0), (4.0 * n - 2.0 / 3.0) - r.plus_landing);
        r.minus_landing = next_crossing(Side::Minus, 4.0 * n, p).x_next;
        r.minus_margin = std::min(r.minus_landing - (4.0 * n + 2.0), (4.0 * n + 4.0) - r.minus_landing);
        if (!(r.plus_margin > 0.0 && r.minus_margin > 0.0)) rep.all_positive = false;
        rep.rows.push_back(r);
    }
    return rep;
}

Confinement confinement_check(const Trajectory& t, double tol) {
    if (t.empty()) throw DomainError("empty trajectory");
    const double bound = t.layer_scaled() ? 1.0 : 0.0;
    Confinement c;
    const auto& first = t.segments().front().samples.front();
    bool found = false;
    if (first.y < bound) {
        c.x_T = first.x;
        found = true;
    } else {
        for (const auto& e : t.events()) {
            if (e.kind == EventKind::Cross || e.kind == EventKind::SlideEntry || e.kind == EventKind::Fold ||
                e.kind == EventKind::LayerEntry) {
                c.x_T = e.x;
                found = true;
                break;
            }
        }
    }
    if (!found) {
        c.x_T = t.x_end();
        c.confined = false;
        return c;
    }
    c.confined = true;
    for (const auto& s : t.segments())
        for (const auto& q : s.samples)
            if (q.x > c.x_T + 1e-12 && q.y > bound + tol) c.confined = false;
    return c;
}

std::vector<AgeingRow> ageing_metrics(SwitchingModel m, double x_lo, double x_hi) {
    std::vector<AgeingRow> out;
    for (const auto& b : branches(m, x_lo, x_hi)) out.push_back({b.n, b.width(), 0.0});
    return out;
}

std::vector<AgeingRow> ageing_metrics(const Trajectory& t) {
    std::map<int, double> slid;
    for (const auto& s : t.segments())
        if ((s.mode == Mode::Sliding || s.mode == Mode::Layer) && s.branch >= 0)
            slid[s.branch] += s.x_end() - s.x_begin();
    std::vector<AgeingRow> out;
    for (const auto& [n, len] : slid) out.push_back({n, make_branch(t.model(), n).width(), len});
    return out;
}

PeriodicityVerdict assess_periodicity(const Trajectory& t, double x_from, double period, double tol) {
    std::vector<Event> first, second;
    bool sliding = false;
    for (const auto& e : t.events()) {
        if (e.kind == EventKind::Start || e.kind == EventKind::End) continue;
        if (e.x >= x_from - tol && e.x < x_from + period - tol) first.push_back(e);
        else if (e.x >= x_from + period - tol && e.x < x_from + 2 * period - tol) second.push_back(e);
        if (e.kind == EventKind::SlideEntry) sliding = true;
    }
    if (first.empty() || first.size() != second.size()) return PeriodicityVerdict::Aperiodic;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i].kind != second[i].kind) return PeriodicityVerdict::Aperiodic;
        if (std::fabs(second[i].x - first[i].x - period) > tol) return PeriodicityVerdict::Aperiodic;
    }
    if (t.model() == SwitchingModel::Nonlinear && sliding) {
        // Only the canonical orbit (exits at multiples of 4, one slide per period 4) is confirmed.
        bool canonical = std::fabs(period - 4.0) < tol;
        for (const auto& e : first)
            if (e.kind == EventKind::SlideExit && std::fabs(e.x / 4.0 - std::round(e.x / 4.0)) > tol) canonical = false;
        for (const auto& e : first)
            if (e.kind == EventKind::Cross) canonical = false;
        return canonical ? PeriodicityVerdict::Periodic : PeriodicityVerdict::UnverifiedAtThreshold;
    }
    return PeriodicityVerdict::Periodic;
}

}  // namespace switchosc
