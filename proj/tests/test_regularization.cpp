#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/layer_integrator.hpp"
#include "switchosc/poincare.hpp"
#include "switchosc/regularization.hpp"

using namespace switchosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

oracle::Rhs layer_rhs(SwitchingModel m, double a, double eps) {
    return [m, a, eps](double x, double v) {
        const double l = oracle::psi_cubic(v);
        const double f = m == SwitchingModel::Linear ? oracle::f_linear(x, l) : oracle::f_nonlinear(x, l);
        return -a * v - f / eps;
    };
}

}  // namespace

TEST_CASE("layer integrator against RK4 in the non-stiff regime") {
    for (auto m : {SwitchingModel::Linear, SwitchingModel::Nonlinear}) {
        const auto p = OscillatorParams::regularized(0.5, 0.3);
        for (double v0 : {-0.6, 0.2, 0.9}) {
            const auto run = integrate_layer(m, p, {0.3, v0}, 2.3);
            REQUIRE_THAT(run.final_state.x, WithinAbs(2.3, 1e-12));
            const double ref = oracle::rk4(layer_rhs(m, 0.5, 0.3), 0.3, v0, 2.3, 40000);
            CHECK_THAT(run.final_state.v, WithinAbs(ref, 1e-7));
        }
    }
}

TEST_CASE("layer trajectories keep x increasing and segments abutting") {
    const auto p = OscillatorParams::regularized(0.01, 0.01);
    const auto run = integrate_layer(SwitchingModel::Linear, p, {0.3, 0.0}, 6.0);
    run.trajectory.check_invariants();
    CHECK(run.trajectory.layer_scaled());
}

TEST_CASE("fold points against bisection on the boundary critical set") {
    for (double eps : {1e-5, 1e-3, 0.05}) {
        const auto p = OscillatorParams::regularized(1.0, eps);
        for (Side s : {Side::Plus, Side::Minus}) {
            const double w = s == Side::Plus ? 1.5 : 0.5;
            for (int n = 1; n <= 12; ++n) {
                const double sg = sign_of(s);
                const double ref = oracle::bisect([&](double x) { return std::sin(oracle::pi * w * x) + sg * eps; },
                                                  (n - 0.3) / w, (n + 0.3) / w);
                CHECK_THAT(fold_point(s, n, p), WithinAbs(ref, 1e-12));
            }
        }
    }
}

TEST_CASE("slow manifold expansion has an O(eps^2) residual") {
    const double a = 0.01;
    const int n = 5;
    auto residual = [&](double eps, bool first_order) {
        const auto p = OscillatorParams::regularized(a, eps);
        double worst = 0.0;
        for (double x = 4.0 * n - 3.0; x <= 4.0 * n - 1.0; x += 0.25) {
            auto v = [&](double xx) {
                const auto s = slow_manifold_expansion(n, xx, p);
                return first_order ? s.v : s.v0;
            };
            const double h = 1e-5;
            const double dv = (v(x + h) - v(x - h)) / (2 * h);
            const double r = eps * dv + a * eps * v(x) + oracle::f_nonlinear(x, oracle::psi_cubic(v(x)));
            worst = std::max(worst, std::fabs(r));
        }
        return worst;
    };
    const double r1 = residual(1e-2, true), r2 = residual(5e-3, true);
    CHECK(r1 / r2 > 3.0);
    CHECK(r1 / r2 < 5.0);
    const double z1 = residual(1e-2, false), z2 = residual(5e-3, false);
    CHECK(z1 / z2 > 1.6);
    CHECK(z1 / z2 < 2.4);
    CHECK(r1 < z1);
}

TEST_CASE("critical branch solves the layer critical manifold at eps -> 0") {
    const auto p = OscillatorParams::regularized(0.01, 1e-9);
    for (int idx : {4, 10, 22}) {
        const auto c = critical_branch_reg(SwitchingModel::Nonlinear, idx, p);
        for (double x = 2.0 * idx / 3.0 + 0.2; x < 2.0 * idx - 0.2; x += 0.37)
            CHECK_THAT(oracle::f_nonlinear(x, oracle::psi_cubic(c.v0(x))), WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("boundary return map tends to the discontinuous crossing") {
    double prev = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto p = OscillatorParams::regularized(0.2, eps);
        const double d = std::fabs(boundary_return_map(Side::Plus, 0.9, p) -
                                   next_crossing(Side::Plus, 0.9, OscillatorParams::discontinuous(0.2)).x_next);
        CHECK(d < prev);
        CHECK(d < 10 * eps);
        prev = d;
    }
}

TEST_CASE("regularized fixed point approaches the discontinuous one") {
    const double xs = find_nonsliding_period4(0.01).x_star;
    double prev = 1.0;
    for (double eps : {1e-2, 2.5e-3}) {
        const auto fp = find_regularized_nonsliding_linear(OscillatorParams::regularized(0.01, eps));
        CHECK(fp.residual < 1e-10);
        CHECK(std::fabs(fp.x_star - xs) < prev);
        prev = std::fabs(fp.x_star - xs);
    }
    CHECK_THAT(prev, WithinAbs(0.003269, 2e-5));
}

TEST_CASE("regularized return derivative against finite differences") {
    const auto p = OscillatorParams::regularized(0.01, 0.05);
    const double x = 0.5, h = 1e-5;
    const auto r = regularized_return_linear(x, p, false);
    const double fd = (regularized_poincare_linear(x + h, p) - regularized_poincare_linear(x - h, p)) / (2 * h);
    CHECK_THAT(r.derivative, WithinRel(std::fabs(fd), 1e-4));
}

TEST_CASE("exit point lies past the fold and near the frozen value") {
    const auto m = measure_exit_point(5, OscillatorParams::regularized(0.01, 1e-3));
    CHECK(m.deviation > 0.0);
    CHECK(m.x_e > m.x_fold);
    CHECK_THAT(m.x_fold, WithinAbs(20.0 + std::asin(1e-5) / (oracle::pi * 0.5), 1e-12));
}

TEST_CASE("v_r reference is 4-periodic") {
    const auto r = v_r_reference(10, OscillatorParams::regularized(0.01, 0.0025));
    CHECK(r.x_eps_a() > 0.0);
    for (double x : {40.3, 41.7, 42.9}) CHECK_THAT(r.value(x + 4.0), WithinAbs(r.value(x), 1e-12));
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(fold_point(Side::Plus, 1, OscillatorParams::discontinuous(1.0)), DomainError);
    CHECK_THROWS_AS(slow_manifold_expansion(0, 1.0, OscillatorParams::regularized(0.01, 1e-3)), DomainError);
}
