#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "switchosc/core.hpp"
#include "switchosc/errors.hpp"
#include "switchosc/transition.hpp"

using namespace switchosc;
using Catch::Matchers::WithinAbs;

TEST_CASE("forcing matches the closed forms at lambda = -1, 0, 1") {
    for (double lambda : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
        for (int i = 0; i <= 400; ++i) {
            const double x = -3.0 + i * 0.0375;
            CHECK_THAT(forcing(SwitchingModel::Linear, x, lambda), WithinAbs(oracle::f_linear(x, lambda), 1e-12));
            CHECK_THAT(forcing(SwitchingModel::Nonlinear, x, lambda), WithinAbs(oracle::f_nonlinear(x, lambda), 1e-12));
        }
    }
}

TEST_CASE("half-plane forcings are pure sines of frequency 3/2 and 1/2") {
    for (double x : {0.1, 1.3, 2.9, 17.25}) {
        CHECK_THAT(forcing(SwitchingModel::Linear, x, 1.0), WithinAbs(std::sin(1.5 * oracle::pi * x), 1e-12));
        CHECK_THAT(forcing(SwitchingModel::Linear, x, -1.0), WithinAbs(std::sin(0.5 * oracle::pi * x), 1e-12));
    }
}

TEST_CASE("forcing rejects lambda outside [-1, 1]") {
    CHECK_THROWS_AS(forcing(SwitchingModel::Linear, 0.5, 1.5), DomainError);
}

TEST_CASE("exact zeros of sin_pi at integers") {
    for (int k = -20; k <= 20; ++k) CHECK(sin_pi(static_cast<double>(k)) == 0.0);
    CHECK(sin_pi(0.5) == 1.0);
    CHECK(cos_pi(1.0) == -1.0);
}

TEST_CASE("vector field sign convention") {
    const auto p = OscillatorParams::discontinuous(0.3);
    const auto up = vector_field(SwitchingModel::Linear, p, 0.2, 0.5);
    CHECK(up.first == 1.0);
    CHECK_THAT(up.second, WithinAbs(-0.15 - std::sin(1.5 * oracle::pi * 0.2), 1e-14));
    const auto dn = vector_field(SwitchingModel::Linear, p, 0.2, -0.5);
    CHECK_THAT(dn.second, WithinAbs(0.15 - std::sin(0.5 * oracle::pi * 0.2), 1e-14));
    CHECK_THROWS_AS(vector_field(SwitchingModel::Linear, p, 0.2, 0.0), DomainError);
}

TEST_CASE("threshold regions repeat with period 4") {
    for (int i = 0; i < 397; ++i) {
        const double x = 0.013 + i * 0.0101;
        CHECK(classify_threshold_point(x) == classify_threshold_point(x + 4.0));
        CHECK(classify_threshold_point(x) == classify_threshold_point(x + 40.0));
    }
    CHECK(classify_threshold_point(0.0) == Region::TangencyMinus);
    CHECK(classify_threshold_point(2.0 / 3.0) == Region::TangencyPlus);
}

TEST_CASE("threshold regions agree with the signs of f(x, +-1)") {
    for (int i = 1; i < 400; ++i) {
        const double x = i * 0.01 + 0.0013;
        const double dplus = -oracle::f_linear(x, 1.0), dminus = -oracle::f_linear(x, -1.0);
        if (std::fabs(dplus) < 1e-6 || std::fabs(dminus) < 1e-6) continue;
        const Region r = classify_threshold_point(x);
        if (dplus < 0 && dminus > 0) CHECK(r == Region::Attracting);
        else if (dplus > 0 && dminus < 0) CHECK(r == Region::Repelling);
        else CHECK(r == Region::Crossing);
    }
}

TEST_CASE("parameter validation") {
    OscillatorParams p;
    p.a = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.a = 0.5;
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(p.validate_regularized(), DomainError);
    p.epsilon = 1e-3;
    CHECK_NOTHROW(p.validate_regularized());
    CHECK(parse_model("nonlinear") == SwitchingModel::Nonlinear);
    CHECK_THROWS_AS(parse_model("quadratic"), DomainError);
}

TEST_CASE("cubic transition function") {
    const auto psi = TransitionFunction::cubic();
    for (int i = -60; i <= 60; ++i) {
        const double v = i * 0.02;
        CHECK_THAT(psi->psi(v), WithinAbs(oracle::psi_cubic(v), 1e-15));
        const double h = 1e-6;
        if (std::fabs(v) < 1.0 - 2 * h)
            CHECK_THAT(psi->psi_prime(v), WithinAbs((psi->psi(v + h) - psi->psi(v - h)) / (2 * h), 1e-8));
    }
    for (double lambda : {-1.0, -0.9, -0.2, 0.0, 0.4, 0.999, 1.0}) CHECK_THAT(psi->psi(psi->inverse(lambda)), WithinAbs(lambda, 1e-13));
    CHECK(psi->validate().ok);
    CHECK(TransitionFunction::sine()->validate().ok);
}

TEST_CASE("transition files") {
    const auto p = TransitionFunction::from_json_text(R"({"type":"polynomial","coefficients":[0,1.5,0,-0.5]})");
    CHECK_THAT(p->psi(0.3), WithinAbs(oracle::psi_cubic(0.3), 1e-15));
    CHECK_THROWS_AS(TransitionFunction::from_json_text("{not json"), DomainError);
    CHECK_THROWS_AS(TransitionFunction::from_json_text(R"({"type":"polynomial","coefficients":[0,1]})"), DomainError);
    CHECK_THROWS_AS(TransitionFunction::from_json_text(R"({"type":"wavelet"})"), DomainError);
}
