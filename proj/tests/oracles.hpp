#pragma once
// Reference computations written without the library: plain formulas and fixed-step RK4.

#include <cmath>
#include <functional>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

inline double f_linear(double x, double lambda) {
    return (1.0 + (1.0 + lambda) * std::cos(pi * x)) * std::sin(pi * x / 2.0);
}

inline double f_nonlinear(double x, double lambda) { return std::sin(pi * x * (1.0 + lambda / 2.0)); }

inline double psi_cubic(double v) {
    if (v >= 1.0) return 1.0;
    if (v <= -1.0) return -1.0;
    return 0.5 * v * (3.0 - v * v);
}

using Rhs = std::function<double(double, double)>;

// dy/dx = rhs(x, y) from x0 to x1 with n steps.
inline double rk4(const Rhs& rhs, double x0, double y0, double x1, int n) {
    const double h = (x1 - x0) / n;
    double x = x0, y = y0;
    for (int i = 0; i < n; ++i) {
        const double k1 = rhs(x, y);
        const double k2 = rhs(x + h / 2, y + h / 2 * k1);
        const double k3 = rhs(x + h / 2, y + h / 2 * k2);
        const double k4 = rhs(x + h, y + h * k3);
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        x = x0 + (i + 1) * h;
    }
    return y;
}

// First x > x0 + skip where y changes sign, by RK4 stepping then bisection on the step.
inline double rk4_zero(const Rhs& rhs, double x0, double y0, double h, double x_max, double skip = 1e-6) {
    double x = x0, y = y0;
    while (x < x_max) {
        const double yn = rk4(rhs, x, y, x + h, 1);
        if (x > x0 + skip && (y > 0) != (yn > 0)) {
            double lo = 0.0, hi = h;
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                const double ym = rk4(rhs, x, y, x + mid, 64);
                if ((ym > 0) == (y > 0)) lo = mid; else hi = mid;
            }
            return x + 0.5 * (lo + hi);
        }
        x += h;
        y = yn;
    }
    return NAN;
}

inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
    double glo = g(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
