#include "switchosc/poincare.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "switchosc/errors.hpp"

namespace switchosc {

bool departure_consistent(Side s, double x_i, const OscillatorParams& p) {
    const double dy = -sin_pi_rational(p.omega(s), x_i);
    const int sg = sign_of(s);
    if (std::fabs(dy) > 1e-12) return sg * dy > 0.0;
    const double d2y = -p.omega(s).value() * kPi * cos_pi_rational(p.omega(s), x_i);
    return sg * d2y > 0.0;
}

PoincareResult next_crossing(Side s, double x_i, const OscillatorParams& p, double tol, double horizon) {
    p.validate();
    if (!departure_consistent(s, x_i, p))
        throw DomainError("field at x_i does not allow departure into the requested half-plane");
    CrossingSearchOptions opt;
    opt.tol = tol;
    opt.horizon = horizon;
    const auto c = first_level_crossing(HalfPlaneArc{s, x_i, 0.0}, 0.0, p, opt, sign_of(s));
    if (!c) throw SolverError("no crossing within the scan horizon (internal error for a > 0)");
    PoincareResult r;
    r.x_next = c->x;
    r.residual = c->residual;
    r.bracket_lo = c->lo - x_i;
    r.bracket_hi = c->hi - x_i;
    r.iterations = c->iterations;
    r.grazing_suspect = c->grazing;
    return r;
}

double composite_map(double x, const OscillatorParams& p) {
    if (!(x > 0.0 && x < 2.0 / 3.0)) throw DomainError("composite map needs x in (0, 2/3)");
    const double xm = next_crossing(Side::Minus, x, p).x_next;
    return next_crossing(Side::Plus, xm, p).x_next;
}

double composite_map(double x, double a) { return composite_map(x, OscillatorParams::discontinuous(a)); }

double dP_da_at_zero(double x0) {
    if (!(x0 > 0.0 && x0 < 2.0 / 3.0)) {
        if (x0 >= 2.0 / 3.0 && x0 - 2.0 / 3.0 < 1e-15) return -std::numeric_limits<double>::infinity();
        throw DomainError("dP/da needs x0 in (0, 2/3)");
    }
    const double t = std::tan(1.5 * kPi * x0);
    if (t == 0.0 || std::fabs(x0 - 2.0 / 3.0) < 1e-15) return -std::numeric_limits<double>::infinity();
    const double bracket = 32.0 / (9.0 * kPi) + (2.0 * x0 / 3.0) / t + (4.0 - 2.0 * x0) / std::tan(0.5 * kPi * x0);
    return (2.0 / kPi) * bracket;
}

double solve_x0() {
    double lo = 0.5, hi = 2.0 / 3.0 - 1e-12;
    double flo = dP_da_at_zero(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = dP_da_at_zero(mid);
        if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
    }
    return 0.5 * (lo + hi);
}

double dP_dx(double x, double a, DerivativeMode mode) {
    const auto p = OscillatorParams::discontinuous(a);
    switch (mode) {
        case DerivativeMode::FiniteDifference: {
            const double hstep = 1e-6;
            return (composite_map(x + hstep, p) - composite_map(x - hstep, p)) / (2.0 * hstep);
        }
        case DerivativeMode::ClosedForm: {
            const double xm = next_crossing(Side::Minus, x, p).x_next;
            const double sm = sin_pi(0.5 * xm);
            const double sx = sin_pi(0.5 * x);
            const double den = 3.0 - 4.0 * sx * sx;
            if (std::fabs(den) < 1e-12) throw DomainError("closed-form derivative denominator vanishes");
            return (3.0 - 4.0 * sm * sm) / den * std::exp(-4.0 * a);
        }
        case DerivativeMode::ChainRule: {
            const double xm = next_crossing(Side::Minus, x, p).x_next;
            const double xp = next_crossing(Side::Plus, xm, p).x_next;
            const double s_x = sin_pi(0.5 * x), s_m = sin_pi(0.5 * xm);
            const double t_m = sin_pi(1.5 * xm), t_p = sin_pi(1.5 * xp);
            if (s_m == 0.0 || t_p == 0.0) throw DomainError("chain-rule derivative at a tangency");
            const double dminus = s_x / s_m * std::exp(-a * (xm - x));
            return t_m / t_p * dminus * std::exp(-a * (xp - xm));
        }
    }
    return 0.0;
}

NonslidingOrbit find_nonsliding_period4(double a, double tol) {
    const auto p = OscillatorParams::discontinuous(a);
    auto delta = [&](double x) -> double {
        try {
            const auto rm = next_crossing(Side::Minus, x, p);
            const auto rp = next_crossing(Side::Plus, rm.x_next, p);
            if (rm.grazing_suspect || rp.grazing_suspect) return std::nan("");
            return rp.x_next - x - 4.0;
        } catch (const DomainError&) {
            return std::nan("");
        }
    };
    constexpr int kSub = 64;
    const double lo_end = 1e-9, hi_end = 2.0 / 3.0 - 1e-9;
    std::vector<double> xs(kSub + 1), ds(kSub + 1);
    for (int k = 0; k <= kSub; ++k) {
        xs[k] = lo_end + (hi_end - lo_end) * k / kSub;
        ds[k] = delta(xs[k]);
    }
    const double x0 = solve_x0();
    std::vector<double> roots;
    for (int k = 0; k < kSub; ++k) {
        if (std::isnan(ds[k]) || std::isnan(ds[k + 1])) continue;
        if (ds[k] == 0.0) { roots.push_back(xs[k]); continue; }
        if ((ds[k] < 0.0) == (ds[k + 1] < 0.0)) continue;
        double l = xs[k], r = xs[k + 1], fl = ds[k];
        for (int it = 0; it < 200 && r - l > tol; ++it) {
            const double m = 0.5 * (l + r);
            const double fm = delta(m);
            if (std::isnan(fm)) throw SolverError("period-4 residual undefined inside a bracket");
            if ((fm < 0.0) == (fl < 0.0)) { l = m; fl = fm; } else { r = m; }
        }
        roots.push_back(0.5 * (l + r));
    }
    if (roots.empty()) throw NoRootError("no non-sliding period-4 orbit for this a");
    double best = roots.front();
    for (double r : roots)
        if (std::fabs(r - x0) < std::fabs(best - x0)) best = r;
    NonslidingOrbit out;
    out.x_star = best;
    out.residual = std::fabs(delta(best));
    out.multiplier = dP_dx(best, a, DerivativeMode::ClosedForm);
    out.stable = out.multiplier > 0.0 && out.multiplier < 1.0;
    return out;
}

}  // namespace switchosc
