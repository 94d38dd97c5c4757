#include "switchosc/analytic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "switchosc/errors.hpp"

namespace switchosc {

namespace {

double reduced_turns(Rational w, double x) {
    // w*x modulo 2, in [-1, 1]
    return std::remainder(w.num * x, 2.0 * w.den) / w.den;
}

double positive_mod(double v, double m) {
    double r = std::fmod(v, m);
    if (r < 0.0) r += m;
    if (r >= m) r -= m;
    return r;
}

}  // namespace

PhaseConstants phase_constants(const OscillatorParams& p) {
    if (!(p.a > 0.0)) throw DomainError("phase constants need a > 0");
    return {std::atan2(p.omega_plus.value() * kPi, p.a), std::atan2(p.omega_minus.value() * kPi, p.a)};
}

double shifted_phase(Side s, double x_i, const OscillatorParams& p) {
    const double phi = phase_constants(p).phi(s);
    return kPi * reduced_turns(p.omega(s), x_i) - phi;
}

double flow_solution(Side s, double x, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    const double D = w * w * kPi * kPi + p.a * p.a;
    auto yp = [&](double t) {
        return (w * kPi * cos_pi_rational(p.omega(s), t) - p.a * sin_pi_rational(p.omega(s), t)) / D;
    };
    return yp(x) - yp(x_i) * std::exp(-p.a * (x - x_i));
}

double h(Side s, double xbar, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    const double vp = shifted_phase(s, x_i, p);
    return std::exp(-p.a * xbar) * std::sin(vp) - std::sin(w * kPi * xbar + vp);
}

double flow_solution_shifted(Side s, double xbar, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    return h(s, xbar, x_i, p) / std::sqrt(w * w * kPi * kPi + p.a * p.a);
}

double h0(Side s, double xbar, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    const double vp = shifted_phase(s, x_i, p);
    return std::sin(vp) - std::sin(w * kPi * xbar + vp);
}

double h_inf(Side s, double xbar, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    return -std::sin(w * kPi * xbar + shifted_phase(s, x_i, p));
}

ZeroLattice::ZeroLattice(std::vector<Family> families) {
    for (const auto& f : families) {
        if (!(f.spacing > 0.0)) throw DomainError("lattice spacing must be positive");
        const double off = positive_mod(f.offset, f.spacing);
        cursors_.push_back({off, f.spacing, 0});
    }
    if (cursors_.empty()) throw DomainError("empty lattice");
}

double ZeroLattice::peek() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cursors_) best = std::min(best, c.value());
    return best;
}

double ZeroLattice::next() {
    for (;;) {
        auto it = std::min_element(cursors_.begin(), cursors_.end(),
                                   [](const Cursor& l, const Cursor& r) { return l.value() < r.value(); });
        const double v = it->value();
        ++it->k;
        if (v > last_ + 1e-13 || last_ < 0.0) {
            last_ = v;
            return v;
        }
    }
}

ZeroLattice h0_lattice(Side s, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    const double phi = phase_constants(p).phi(s);
    const double period = 2.0 / w;
    // (2n+1)/w + 2 phi/(w pi) - 2 x_i, with 2 x_i reduced modulo the period
    const double shift = positive_mod(2.0 * reduced_turns(p.omega(s), x_i) / w, period);
    return ZeroLattice({{0.0, period}, {1.0 / w + 2.0 * phi / (w * kPi) - shift, period}});
}

ZeroLattice hinf_lattice(Side s, double x_i, const OscillatorParams& p) {
    const double w = p.omega(s).value();
    const double phi = phase_constants(p).phi(s);
    const double shift = reduced_turns(p.omega(s), x_i) / w;
    return ZeroLattice({{phi / (w * kPi) - shift, 1.0 / w}});
}

namespace {
std::vector<double> take(ZeroLattice lat, int count) {
    if (count < 1) throw DomainError("count must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(lat.next());
    return out;
}
}  // namespace

std::vector<double> h0_zeros(Side s, double x_i, const OscillatorParams& p, int count) {
    return take(h0_lattice(s, x_i, p), count);
}

std::vector<double> hinf_zeros(Side s, double x_i, const OscillatorParams& p, int count) {
    return take(hinf_lattice(s, x_i, p), count);
}

double p0_map(Side s, double x_i, const OscillatorParams& p) {
    const Rational w = p.omega(s);
    const double wx = w.num * x_i / w.den;
    return (2.0 / w.value()) * (1.0 + std::floor(wx)) - x_i;
}

double HalfPlaneArc::value(double x, const OscillatorParams& p) const {
    const double w = p.omega(side).value();
    const double sqrtD = std::sqrt(w * w * kPi * kPi + p.a * p.a);
    const double theta = shifted_phase(side, x0, p);
    const double K = sqrtD * y0 + std::sin(theta);
    const double s = x - x0;
    return (K * std::exp(-p.a * s) - std::sin(w * kPi * s + theta)) / sqrtD;
}

double HalfPlaneArc::slope(double x, const OscillatorParams& p) const {
    return -p.a * value(x, p) - sin_pi_rational(p.omega(side), x);
}

namespace {

struct ExpSine {
    double a, wpi, K, theta, C;
    double g(double s) const { return K * std::exp(-a * s) - std::sin(wpi * s + theta) - C; }
    double dg(double s) const { return -a * K * std::exp(-a * s) - wpi * std::cos(wpi * s + theta); }
};

// Critical points of g in (l, r), sorted.
void critical_points(const ExpSine& f, double l, double r, double skip, std::vector<double>& out) {
    out.clear();
    constexpr int kSub = 4;
    double pl = l, dl = f.dg(l);
    for (int i = 1; i <= kSub; ++i) {
        const double pr = (i == kSub) ? r : l + (r - l) * i / kSub;
        const double dr = f.dg(pr);
        if ((dl < 0.0 && dr > 0.0) || (dl > 0.0 && dr < 0.0)) {
            double lo = pl, hi = pr, dlo = dl;
            for (int k = 0; k < 80 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++k) {
                const double mid = 0.5 * (lo + hi);
                const double dm = f.dg(mid);
                if ((dm < 0.0) == (dlo < 0.0)) { lo = mid; dlo = dm; } else { hi = mid; }
            }
            const double c = 0.5 * (lo + hi);
            if (c > skip && c > l && c < r) out.push_back(c);
        }
        pl = pr;
        dl = dr;
    }
}

}  // namespace

std::optional<LevelCrossing> first_level_crossing(const HalfPlaneArc& arc, double level,
                                                  const OscillatorParams& p,
                                                  const CrossingSearchOptions& opt, int departure) {
    if (!(p.a > 0.0)) throw DomainError("crossing search needs a > 0");
    const double w = p.omega(arc.side).value();
    const double sqrtD = std::sqrt(w * w * kPi * kPi + p.a * p.a);
    const double theta = shifted_phase(arc.side, arc.x0, p);
    ExpSine f{p.a, w * kPi, sqrtD * arc.y0 + std::sin(theta), theta, sqrtD * level};

    const bool on_level = departure != 0;
    int sigma = departure;
    if (!on_level) {
        const double g0 = f.g(0.0);
        if (g0 == 0.0) throw DomainError("arc starts on the level; a departure side is required");
        sigma = g0 > 0.0 ? 1 : -1;
    }

    const double step = std::min(1.0 / (8.0 * w), 1.0 / (4.0 * p.a));
    double horizon = opt.horizon;
    if (horizon <= 0.0) {
        const double reach = std::max(1.0 - std::fabs(f.C), 1e-3);
        const double decay = std::fabs(f.K) > reach ? std::log(std::fabs(f.K) / reach) / p.a : 0.0;
        horizon = decay + 8.0 / w + 1.0;
    }
    const double skip = on_level ? 1e-7 * step : -1.0;

    // Lattice probes only make sense for threshold departures.
    std::optional<ZeroLattice> lat0, latinf;
    if (on_level && level == 0.0 && arc.y0 == 0.0) {
        lat0.emplace(h0_lattice(arc.side, arc.x0, p));
        latinf.emplace(hinf_lattice(arc.side, arc.x0, p));
    }
    auto next_probe = [&](double after) {
        double best = std::numeric_limits<double>::infinity();
        for (auto* lat : {&lat0, &latinf}) {
            if (!*lat) continue;
            while ((*lat)->peek() <= after + 1e-12) (*lat)->next();
            best = std::min(best, (*lat)->peek());
        }
        return best;
    };

    std::vector<double> crit;
    std::vector<double> nodes;
    double l = 0.0;
    long long grid_k = 0;
    int iterations = 0;
    while (l < horizon) {
        double r = static_cast<double>(grid_k + 1) * step;
        if (r <= l + 1e-12) {
            ++grid_k;
            continue;
        }
        r = std::min(r, next_probe(l));
        if (r >= static_cast<double>(grid_k + 1) * step - 1e-12) ++grid_k;

        critical_points(f, l, r, skip, crit);
        nodes.clear();
        nodes.push_back(l);
        nodes.insert(nodes.end(), crit.begin(), crit.end());
        nodes.push_back(r);
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double pnode = nodes[i], qnode = nodes[i + 1];
            const bool start_piece = on_level && pnode == 0.0;
            const double gp = start_piece ? static_cast<double>(sigma) : f.g(pnode);
            const double gq = f.g(qnode);
            if (!(sigma * gp > 0.0 && sigma * gq <= 0.0)) continue;
            double lo = pnode, hi = qnode;
            if (gq != 0.0) {
                while (hi - lo > std::max(opt.width, 4.0 * std::numeric_limits<double>::epsilon() * hi)) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    ++iterations;
                    if (sigma * f.g(mid) > 0.0) lo = mid; else hi = mid;
                    if (iterations > 100000) throw SolverError("crossing bisection did not converge");
                }
            } else {
                lo = hi;
            }
            const double root = 0.5 * (lo + hi);
            if (on_level && root < skip) throw DomainError("departure direction inconsistent with the field");
            LevelCrossing out;
            out.x = arc.x0 + root;
            out.residual = std::fabs(f.g(root));
            out.lo = arc.x0 + pnode;
            out.hi = arc.x0 + qnode;
            out.iterations = iterations;
            out.grazing = std::fabs(f.dg(root)) < 1e-8;
            return out;
        }
        l = r;
    }
    return std::nullopt;
}

}  // namespace switchosc
