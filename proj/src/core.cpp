#include "switchosc/core.hpp"

#include <cmath>
#include <string>

#include "switchosc/errors.hpp"
#include "switchosc/transition.hpp"

namespace switchosc {

std::string_view to_string(SwitchingModel m) {
    return m == SwitchingModel::Linear ? "linear" : "nonlinear";
}

SwitchingModel parse_model(std::string_view s) {
    if (s == "linear" || s == "Linear" || s == "L") return SwitchingModel::Linear;
    if (s == "nonlinear" || s == "Nonlinear" || s == "N") return SwitchingModel::Nonlinear;
    throw DomainError("unknown switching model: " + std::string(s));
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::FlowPlus: return "flow+";
        case Mode::FlowMinus: return "flow-";
        case Mode::Sliding: return "sliding";
        case Mode::Layer: return "layer";
    }
    return "?";
}

std::string_view to_string(Region r) {
    switch (r) {
        case Region::Attracting: return "attracting";
        case Region::Repelling: return "repelling";
        case Region::Crossing: return "crossing";
        case Region::TangencyPlus: return "tangency+";
        case Region::TangencyMinus: return "tangency-";
    }
    return "?";
}

double sin_pi(double t) {
    double r = std::remainder(t, 2.0);  // exact, in [-1, 1]
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(kPi * r);
}

double cos_pi(double t) {
    double r = std::fabs(std::remainder(t, 2.0));  // [0, 1]
    if (r > 0.5) return -std::sin(kPi * (r - 0.5));
    return std::sin(kPi * (0.5 - r));
}

namespace {
double reduce_rational(Rational w, double x) {
    // w*x mod 2 == (num*x mod 2*den) / den
    return std::remainder(w.num * x, 2.0 * w.den) / w.den;
}
}  // namespace

double sin_pi_rational(Rational w, double x) { return sin_pi(reduce_rational(w, x)); }
double cos_pi_rational(Rational w, double x) { return cos_pi(reduce_rational(w, x)); }

const TransitionFunction& OscillatorParams::transition() const {
    if (psi) return *psi;
    static const auto cubic = TransitionFunction::cubic();
    return *cubic;
}

void OscillatorParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("damping a must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be >= 0");
    if (omega_plus.den <= 0 || omega_minus.den <= 0 || omega_plus.num <= 0 || omega_minus.num <= 0)
        throw DomainError("frequencies must be positive rationals");
    if (epsilon > 0.0 && a * epsilon >= 1.0) throw DomainError("a*epsilon must be < 1");
}

void OscillatorParams::validate_regularized() const {
    validate();
    if (!(epsilon > 0.0)) throw DomainError("regularized system needs epsilon > 0");
}

OscillatorParams OscillatorParams::discontinuous(double a) {
    OscillatorParams p;
    p.a = a;
    p.validate();
    return p;
}

OscillatorParams OscillatorParams::regularized(double a, double epsilon,
                                               std::shared_ptr<const TransitionFunction> psi) {
    OscillatorParams p;
    p.a = a;
    p.epsilon = epsilon;
    p.psi = std::move(psi);
    p.validate_regularized();
    return p;
}

OscillatorParams params_from_circuit(double resistance, double inductance) {
    if (!(resistance > 0.0) || !(inductance > 0.0))
        throw DomainError("resistance and inductance must be positive");
    return OscillatorParams::discontinuous(resistance / inductance);
}

namespace {
void check_lambda(double lambda) {
    if (!(std::fabs(lambda) <= 1.0)) throw DomainError("lambda must lie in [-1, 1]");
}
}  // namespace

double forcing(SwitchingModel m, double x, double lambda) {
    check_lambda(lambda);
    if (m == SwitchingModel::Linear) {
        return (1.0 + (1.0 + lambda) * cos_pi(x)) * sin_pi(0.5 * x);
    }
    return sin_pi(x * (1.0 + 0.5 * lambda));
}

double forcing(SwitchingModel m, double x, double lambda, const OscillatorParams& p) {
    if (p.standard_frequencies()) return forcing(m, x, lambda);
    check_lambda(lambda);
    const double wp = p.omega_plus.value();
    const double wm = p.omega_minus.value();
    if (m == SwitchingModel::Linear) {
        return 0.5 * (1.0 + lambda) * sin_pi_rational(p.omega_plus, x) +
               0.5 * (1.0 - lambda) * sin_pi_rational(p.omega_minus, x);
    }
    return sin_pi(x * 0.5 * ((1.0 + lambda) * wp + (1.0 - lambda) * wm));
}

double dforcing_dlambda(SwitchingModel m, double x, double lambda, const OscillatorParams& p) {
    check_lambda(lambda);
    if (m == SwitchingModel::Linear) {
        if (p.standard_frequencies()) return cos_pi(x) * sin_pi(0.5 * x);
        return 0.5 * (sin_pi_rational(p.omega_plus, x) - sin_pi_rational(p.omega_minus, x));
    }
    const double wp = p.omega_plus.value();
    const double wm = p.omega_minus.value();
    if (p.standard_frequencies()) return 0.5 * kPi * x * cos_pi(x * (1.0 + 0.5 * lambda));
    return 0.5 * kPi * x * (wp - wm) * cos_pi(x * 0.5 * ((1.0 + lambda) * wp + (1.0 - lambda) * wm));
}

std::pair<double, double> vector_field(SwitchingModel m, const OscillatorParams& p, double x, double y) {
    if (y == 0.0) throw DomainError("vector field undefined on y = 0; use the sliding module");
    const double lambda = y > 0.0 ? 1.0 : -1.0;
    return {1.0, -p.a * y - forcing(m, x, lambda, p)};
}

Region classify_threshold_point(double x, double tol) {
    const double r = x - 4.0 * std::floor(x / 4.0);
    const double t_minus = r / 2.0;
    if (std::fabs(t_minus - std::round(t_minus)) <= tol) return Region::TangencyMinus;
    const double t_plus = 1.5 * r;
    if (std::fabs(t_plus - std::round(t_plus)) <= tol) return Region::TangencyPlus;
    const double dy_plus = -sin_pi(1.5 * r);
    const double dy_minus = -sin_pi(0.5 * r);
    if (dy_plus < 0.0 && dy_minus > 0.0) return Region::Attracting;
    if (dy_plus > 0.0 && dy_minus < 0.0) return Region::Repelling;
    return Region::Crossing;
}

}  // namespace switchosc
