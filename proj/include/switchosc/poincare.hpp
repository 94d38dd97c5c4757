#pragma once

#include "switchosc/analytic_flow.hpp"
#include "switchosc/core.hpp"

namespace switchosc {

struct PoincareResult {
    double x_next = 0.0;
    double residual = 0.0;
    double bracket_lo = 0.0;  // in xbar = x - x_i
    double bracket_hi = 0.0;
    int iterations = 0;
    bool grazing_suspect = false;
};

// True when leaving y = 0 at x_i into the given half-plane is consistent with the field
// (first order, or second order at a tangency).
bool departure_consistent(Side s, double x_i, const OscillatorParams& p);

PoincareResult next_crossing(Side s, double x_i, const OscillatorParams& p, double tol = 1e-12,
                             double horizon = 0.0);

double composite_map(double x, double a);
double composite_map(double x, const OscillatorParams& p);

// Pole at 2/3 reported as -infinity.
double dP_da_at_zero(double x0);
double solve_x0();

// ClosedForm holds only at fixed points of P - 4.
enum class DerivativeMode { ClosedForm, FiniteDifference, ChainRule };
double dP_dx(double x, double a, DerivativeMode mode);

struct NonslidingOrbit {
    double x_star = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;  // |P(x*) - x* - 4|
    bool stable = false;
};

NonslidingOrbit find_nonsliding_period4(double a, double tol = 1e-13);

}  // namespace switchosc
