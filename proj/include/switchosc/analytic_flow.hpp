#pragma once

#include <optional>
#include <vector>

#include "switchosc/core.hpp"

namespace switchosc {

struct PhaseConstants {
    double phi_plus = 0.0;
    double phi_minus = 0.0;
    double phi(Side s) const { return s == Side::Plus ? phi_plus : phi_minus; }
};

PhaseConstants phase_constants(const OscillatorParams& p);

// omega*pi*x_i - phi, reduced to (-pi - phi, pi - phi].
double shifted_phase(Side s, double x_i, const OscillatorParams& p);

// Y(x, x_i): solution in S+ or S- with Y(x_i) = 0, closed form with particular solution.
double flow_solution(Side s, double x, double x_i, const OscillatorParams& p);
// y(xbar, x_i) = Y(x_i + xbar, x_i) evaluated in the shifted form.
double flow_solution_shifted(Side s, double xbar, double x_i, const OscillatorParams& p);

// h(xbar) = exp(-a xbar) sin(varphi) - sin(omega pi xbar + varphi).
double h(Side s, double xbar, double x_i, const OscillatorParams& p);
double h0(Side s, double xbar, double x_i, const OscillatorParams& p);
double h_inf(Side s, double xbar, double x_i, const OscillatorParams& p);

// Ascending merge of arithmetic progressions {offset + k*spacing >= 0}.
class ZeroLattice {
public:
    struct Family {
        double offset;
        double spacing;
    };
    explicit ZeroLattice(std::vector<Family> families);
    double next();
    double peek() const;

private:
    struct Cursor {
        double offset;
        double spacing;
        long long k;
        double value() const { return offset + static_cast<double>(k) * spacing; }
    };
    std::vector<Cursor> cursors_;
    double last_ = -1.0;
};

ZeroLattice h0_lattice(Side s, double x_i, const OscillatorParams& p);
ZeroLattice hinf_lattice(Side s, double x_i, const OscillatorParams& p);
std::vector<double> h0_zeros(Side s, double x_i, const OscillatorParams& p, int count);
std::vector<double> hinf_zeros(Side s, double x_i, const OscillatorParams& p, int count);

// a = 0 crossing map.
double p0_map(Side s, double x_i, const OscillatorParams& p = {});

// Solution of the half-plane ODE through (x0, y0), lambda fixed to sign(side).
struct HalfPlaneArc {
    Side side = Side::Plus;
    double x0 = 0.0;
    double y0 = 0.0;

    double value(double x, const OscillatorParams& p) const;
    double slope(double x, const OscillatorParams& p) const;
};

struct LevelCrossing {
    double x = 0.0;
    double residual = 0.0;  // |g| at the root, g = sqrt(D) * (y - level)
    double lo = 0.0;        // bracket in x, g of opposite signs at the ends
    double hi = 0.0;
    int iterations = 0;
    bool grazing = false;
};

struct CrossingSearchOptions {
    double tol = 1e-12;
    double horizon = 0.0;  // 0 = automatic
    double width = 1e-13;
};

// First x > arc.x0 where the arc meets y = level. When the arc starts on the level,
// `departure` gives the side it leaves to (+1 above, -1 below).
std::optional<LevelCrossing> first_level_crossing(const HalfPlaneArc& arc, double level,
                                                  const OscillatorParams& p,
                                                  const CrossingSearchOptions& opt = {},
                                                  int departure = 0);

}  // namespace switchosc
