#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/sliding.hpp"

using namespace switchosc;
using Catch::Matchers::WithinAbs;

TEST_CASE("linear branches: lambda in [-1, 1] on the interval and f vanishes there") {
    for (const auto& b : linear_branches(0.0, 24.0)) {
        REQUIRE(b.width() > 0.0);
        for (int i = 1; i < 20; ++i) {
            const double x = b.lo + b.width() * i / 20.0;
            const double l = b.lambda(x);
            CHECK(std::fabs(l) <= 1.0);
            CHECK_THAT(oracle::f_linear(x, l), WithinAbs(0.0, 1e-10));
            const double h = 1e-6;
            CHECK_THAT(b.dlambda(x), WithinAbs((b.lambda(x + h) - b.lambda(x - h)) / (2 * h), 1e-5 * (1 + std::fabs(b.dlambda(x)))));
        }
    }
}

TEST_CASE("nonlinear branches solve sin(pi x (1 + lambda/2)) = 0") {
    for (const auto& b : nonlinear_branches(0.5, 30.0)) {
        for (int i = 1; i < 10; ++i) {
            const double x = b.lo + b.width() * i / 10.0;
            CHECK_THAT(oracle::f_nonlinear(x, b.lambda(x)), WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("linear sliding orbit at a = 10") {
    const auto o = find_sliding_period4_linear(10.0);
    CHECK(o.x3 > 20.0 / 3.0);
    CHECK(o.x3 < 22.0 / 3.0);
    CHECK(o.closure_error < 1e-8);
    CHECK_THAT(o.x3, WithinAbs(6.76010944011, 1e-9));
    o.trajectory.check_invariants();
}

TEST_CASE("no linear sliding orbit at a = 1e-3") {
    CHECK_THROWS_AS(find_sliding_period4_linear(1e-3), NoRootError);
}

TEST_CASE("nonlinear sliding orbit lands in (2, 4)") {
    for (double a : {0.1, 0.5, 2.0}) {
        const auto o = find_sliding_period4_nonlinear(a, 2);
        CHECK(o.x_a > 2.0);
        CHECK(o.x_a < 4.0);
        CHECK(o.closure_error <= 1e-12);
    }
    CHECK_THAT(find_sliding_period4_nonlinear(0.1).x_a, WithinAbs(3.4587, 1e-3));
}

TEST_CASE("discontinuous simulation follows the half-plane flow") {
    const auto p = OscillatorParams::discontinuous(0.3);
    const auto t = simulate_discontinuous(SwitchingModel::Linear, p, {0.2, 0.4, Mode::FlowPlus, -1}, 0.9);
    t.check_invariants();
    const double ref = oracle::rk4([](double x, double y) { return -0.3 * y - oracle::f_linear(x, 1.0); }, 0.2, 0.4, 0.9, 20000);
    CHECK_THAT(t.value_at(0.9), WithinAbs(ref, 1e-9));
}
