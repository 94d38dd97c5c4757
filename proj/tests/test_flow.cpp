#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "switchosc/analytic_flow.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/poincare.hpp"

using namespace switchosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

oracle::Rhs half_plane(double a, double lambda) {
    return [a, lambda](double x, double y) { return -a * y - oracle::f_linear(x, lambda); };
}

double rk4_next_crossing(Side s, double x, double a) {
    return oracle::rk4_zero(half_plane(a, s == Side::Plus ? 1.0 : -1.0), x, 0.0, 1e-3, x + 12.0);
}

// On (0, 2/3) the field points down, so the lower half-plane comes first.
double rk4_composite(double x, double a) { return rk4_next_crossing(Side::Plus, rk4_next_crossing(Side::Minus, x, a), a); }

}  // namespace

TEST_CASE("closed-form arcs agree with RK4") {
    for (double a : {0.01, 0.7, 3.0}) {
        const auto p = OscillatorParams::discontinuous(a);
        for (Side s : {Side::Plus, Side::Minus}) {
            const HalfPlaneArc arc{s, 0.37, 0.25};
            for (double x1 : {0.9, 1.7, 3.2}) {
                const double ref = oracle::rk4(half_plane(a, s == Side::Plus ? 1.0 : -1.0), 0.37, 0.25, x1, 20000);
                CHECK_THAT(arc.value(x1, p), WithinAbs(ref, 1e-10));
                const double h = 1e-5;
                CHECK_THAT(arc.slope(x1, p), WithinAbs((arc.value(x1 + h, p) - arc.value(x1 - h, p)) / (2 * h), 1e-7));
            }
        }
    }
}

TEST_CASE("flow_solution starts on y = 0") {
    const auto p = OscillatorParams::discontinuous(0.4);
    for (double xi : {0.2, 1.1, 2.5})
        for (Side s : {Side::Plus, Side::Minus}) CHECK_THAT(flow_solution(s, xi, xi, p), WithinAbs(0.0, 1e-14));
}

TEST_CASE("next_crossing agrees with RK4 plus bisection") {
    for (double a : {0.01, 0.05, 2.0}) {
        const auto p = OscillatorParams::discontinuous(a);
        for (double x : {0.1, 0.35, 0.5}) {
            const auto dn = next_crossing(Side::Minus, x, p);
            CHECK_THAT(dn.x_next, WithinAbs(rk4_next_crossing(Side::Minus, x, a), 1e-9));
            const auto up = next_crossing(Side::Plus, dn.x_next, p);
            CHECK_THAT(up.x_next, WithinAbs(rk4_next_crossing(Side::Plus, dn.x_next, a), 1e-9));
        }
    }
}

TEST_CASE("half-plane maps commute with their periods") {
    const auto p = OscillatorParams::discontinuous(0.05);
    for (double x : {0.1, 0.4}) {
        CHECK_THAT(next_crossing(Side::Minus, x + 4.0, p).x_next, WithinAbs(next_crossing(Side::Minus, x, p).x_next + 4.0, 1e-11));
        const double m = next_crossing(Side::Minus, x, p).x_next;
        CHECK_THAT(next_crossing(Side::Plus, m + 4.0 / 3.0, p).x_next,
                   WithinAbs(next_crossing(Side::Plus, m, p).x_next + 4.0 / 3.0, 1e-11));
    }
}

TEST_CASE("composite map against RK4") {
    for (double a : {0.01, 0.05, 2.0})
        for (double x : {0.15, 0.5}) CHECK_THAT(composite_map(x, a), WithinAbs(rk4_composite(x, a), 1e-8));
    CHECK_THAT(composite_map(0.62, 0.01), WithinAbs(rk4_composite(0.62, 0.01), 1e-8));
}

TEST_CASE("no upward departure from the sliding region") {
    // a = 0.3: the lower arc lands in (3, 10/3)
    const auto p = OscillatorParams::discontinuous(0.3);
    const double m = next_crossing(Side::Minus, 0.35, p).x_next;
    CHECK(m > 3.0);
    CHECK(m < 10.0 / 3.0);
    CHECK_FALSE(departure_consistent(Side::Plus, m, p));
    CHECK_THROWS_AS(composite_map(0.35, 0.3), DomainError);
}

TEST_CASE("composite map tends to x + 4 as a -> 0") {
    for (double x : {0.1, 0.3, 0.5, 0.6}) {
        const double d1 = composite_map(x, 1e-6) - (x + 4.0);
        const double d2 = composite_map(x, 1e-7) - (x + 4.0);
        CHECK(std::fabs(d1) < 1e-4);
        CHECK_THAT(d1 / d2, WithinRel(10.0, 1e-3));
        CHECK_THAT(d1 / 1e-6, WithinRel(dP_da_at_zero(x), 1e-4));
    }
}

TEST_CASE("frozen reference values") {
    CHECK_THAT(solve_x0(), WithinAbs(0.635754516337, 1e-11));
    const auto o = find_nonsliding_period4(0.01);
    CHECK_THAT(o.x_star, WithinAbs(0.626124996889, 1e-11));
    CHECK_THAT(o.multiplier, WithinAbs(0.49608228336, 1e-9));
    CHECK(o.stable);
    CHECK(o.residual < 1e-12);
    CHECK_THAT(dP_da_at_zero(solve_x0()), WithinAbs(0.0, 1e-9));
}

TEST_CASE("fixed point agrees with an RK4 root") {
    const double a = 0.01;
    const double xs = oracle::bisect([a](double x) { return rk4_composite(x, a) - x - 4.0; }, 0.55, 0.66, 45);
    CHECK_THAT(find_nonsliding_period4(a).x_star, WithinAbs(xs, 1e-8));
}

TEST_CASE("derivative modes") {
    const double a = 0.05;
    for (double x : {0.15, 0.3, 0.5}) {
        const double c = dP_dx(x, a, DerivativeMode::ChainRule);
        CHECK_THAT(dP_dx(x, a, DerivativeMode::FiniteDifference), WithinRel(c, 1e-6));
        const double h = 1e-5;
        CHECK_THAT(c, WithinRel((rk4_composite(x + h, a) - rk4_composite(x - h, a)) / (2 * h), 1e-4));
    }
    for (double b : {0.001, 0.005, 0.01}) {
        const double xs = find_nonsliding_period4(b).x_star;
        const double c = dP_dx(xs, b, DerivativeMode::ClosedForm);
        CHECK_THAT(dP_dx(xs, b, DerivativeMode::ChainRule), WithinRel(c, 1e-8));
        CHECK_THAT(dP_dx(xs, b, DerivativeMode::FiniteDifference), WithinAbs(c, 1e-4));
    }
}
