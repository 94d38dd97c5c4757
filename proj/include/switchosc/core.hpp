#pragma once

#include <memory>
#include <string_view>
#include <utility>

namespace switchosc {

class TransitionFunction;

enum class SwitchingModel { Linear, Nonlinear };

std::string_view to_string(SwitchingModel m);
SwitchingModel parse_model(std::string_view s);

enum class Side : int { Minus = -1, Plus = 1 };

inline constexpr int sign_of(Side s) { return static_cast<int>(s); }
inline constexpr Side opposite(Side s) { return s == Side::Plus ? Side::Minus : Side::Plus; }

struct Rational {
    int num = 1;
    int den = 1;
    constexpr double value() const { return static_cast<double>(num) / den; }
    friend constexpr bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr Rational kOmegaPlus{3, 2};
inline constexpr Rational kOmegaMinus{1, 2};
inline constexpr double kPi = 3.14159265358979323846;

// sin(pi t) and cos(pi t) with exact reduction of t modulo 2.
double sin_pi(double t);
double cos_pi(double t);

// sin(pi * w * x) with w = num/den, reducing num*x modulo 2*den first.
double sin_pi_rational(Rational w, double x);
double cos_pi_rational(Rational w, double x);

struct OscillatorParams {
    double a = 1.0;
    Rational omega_plus = kOmegaPlus;
    Rational omega_minus = kOmegaMinus;
    double epsilon = 0.0;  // 0 selects the discontinuous system
    std::shared_ptr<const TransitionFunction> psi;  // null selects the cubic

    bool standard_frequencies() const {
        return omega_plus == kOmegaPlus && omega_minus == kOmegaMinus;
    }
    Rational omega(Side s) const { return s == Side::Plus ? omega_plus : omega_minus; }
    const TransitionFunction& transition() const;

    void validate() const;
    void validate_regularized() const;

    static OscillatorParams discontinuous(double a);
    static OscillatorParams regularized(double a, double epsilon,
                                        std::shared_ptr<const TransitionFunction> psi = nullptr);
};

// Damping rate of the RL circuit, a = R/L.
OscillatorParams params_from_circuit(double resistance, double inductance);

double forcing(SwitchingModel m, double x, double lambda);
double forcing(SwitchingModel m, double x, double lambda, const OscillatorParams& p);
double dforcing_dlambda(SwitchingModel m, double x, double lambda, const OscillatorParams& p);

enum class Mode { FlowPlus, FlowMinus, Sliding, Layer };
std::string_view to_string(Mode m);
inline Mode flow_mode(Side s) { return s == Side::Plus ? Mode::FlowPlus : Mode::FlowMinus; }

struct HybridState {
    double x = 0.0;
    double y = 0.0;
    Mode mode = Mode::FlowPlus;
    int branch = -1;
};

// (dx, dy) of the discontinuous field; y == 0 is rejected.
std::pair<double, double> vector_field(SwitchingModel m, const OscillatorParams& p, double x, double y);

enum class Region { Attracting, Repelling, Crossing, TangencyPlus, TangencyMinus };
std::string_view to_string(Region r);

Region classify_threshold_point(double x, double tol = 1e-12);

}  // namespace switchosc
