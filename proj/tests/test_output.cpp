#include <catch_amalgamated.hpp>

#include <clocale>
#include <locale>

#include "switchosc/errors.hpp"
#include "switchosc/output.hpp"
#include "switchosc/scaling.hpp"
#include "switchosc/sliding.hpp"

using namespace switchosc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("numbers use 12 significant digits and a point") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-2.0) == "-2");
    CHECK(format_number(6.76010944011234) == "6.76010944011");
    CHECK(format_number(1.5e-20) == "1.5e-20");
    CHECK(parse_number("0.333333333333") == 0.333333333333);
    CHECK_THROWS_AS(parse_number("1,5"), DomainError);
}

TEST_CASE("formatting ignores the global locale") {
    const char* names[] = {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE"};
    for (const char* n : names) {
        if (std::setlocale(LC_ALL, n)) {
            CHECK(format_number(1234.5) == "1234.5");
            std::setlocale(LC_ALL, "C");
            break;
        }
    }
    CHECK(format_number(1234.5) == "1234.5");
}

TEST_CASE("trajectory CSV round trip") {
    const auto t = simulate_discontinuous(SwitchingModel::Linear, OscillatorParams::discontinuous(10.0), {10.0 / 3.0, 0.0, Mode::FlowPlus, -1}, 12.0);
    const auto csv = trajectory_csv(t);
    CHECK(csv.rfind(std::string(kTrajectoryCsvHeader) + "\n", 0) == 0);
    const auto rows = parse_trajectory_csv(csv);
    REQUIRE(rows.size() > 10);
    CHECK(rows_csv(rows) == csv);
    bool sliding = false, event = false;
    for (const auto& r : rows) {
        sliding = sliding || r.mode == "sliding";
        event = event || !r.event.empty();
    }
    CHECK(sliding);
    CHECK(event);
    CHECK_THROWS_AS(parse_trajectory_csv("x,y\n1,2\n"), DomainError);
    CHECK_THROWS_AS(parse_trajectory_csv(std::string(kTrajectoryCsvHeader) + "\n1,abc,flow+,-1,\n"), DomainError);
}

TEST_CASE("SVG output is self-contained and deterministic") {
    SvgPlot plot;
    plot.title = "a < b & c";
    plot.series.push_back({"s", {{0.0, 1.0}, {1.0, 2.0}, {2.0, 0.5}}});
    plot.series.push_back({"m", {{0.5, 1.5}}, "#d62728", true});
    const auto a = render_svg(plot), b = render_svg(plot);
    CHECK(a == b);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(a.find("href") == std::string::npos);
    CHECK(a.find("a &lt; b &amp; c") != std::string::npos);
    CHECK(a.find("<polyline") != std::string::npos);
    CHECK(a.find("<circle") != std::string::npos);
}

TEST_CASE("log axes accept positive data") {
    SvgPlot plot;
    plot.log_x = plot.log_y = true;
    plot.series.push_back({"p", {{1e-4, 1e-3}, {1e-2, 1e-1}}});
    CHECK(render_svg(plot).find("<polyline") != std::string::npos);
}

TEST_CASE("power-law fit recovers an exact exponent") {
    std::vector<std::pair<double, double>> s;
    for (double x : {1e-4, 1e-3, 1e-2, 1e-1}) s.emplace_back(x, 3.0 * std::pow(x, 2.0 / 3.0));
    const auto f = fit_power_law(s);
    CHECK_THAT(f.exponent, WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(f.intercept, WithinAbs(std::log10(3.0), 1e-12));
    CHECK_THAT(f.r_squared, WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(fit_power_law({{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}, {4.0, 4.0}}), DomainError);
    CHECK_THROWS_AS(fit_power_law({{1e-3, 1.0}, {1e-2, 2.0}, {1e-1, 3.0}}), DomainError);
}
