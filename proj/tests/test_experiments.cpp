#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>

#include "switchosc/errors.hpp"
#include "switchosc/experiments.hpp"
#include "switchosc/output.hpp"

using namespace switchosc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("switchosc_test_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("every scenario file loads and names a known kind") {
    const auto ids = list_scenarios(default_scenario_dir());
    REQUIRE(ids.size() >= 20);
    const auto kinds = known_kinds();
    int with_criterion = 0;
    for (const auto& id : ids) {
        const auto s = find_scenario(id, default_scenario_dir());
        CHECK(s.id == id);
        CHECK(std::find(kinds.begin(), kinds.end(), s.kind) != kinds.end());
        CHECK_FALSE(s.checks.empty());
        if (s.criterion > 0) ++with_criterion;
    }
    CHECK(with_criterion == 13);
}

TEST_CASE("malformed scenarios are rejected") {
    CHECK_THROWS(scenario_from_json(nlohmann::json::parse(R"({"title":"no id"})")));
    CHECK_THROWS_AS(find_scenario("NOPE", default_scenario_dir()), DomainError);
    Scenario s;
    s.id = "x";
    s.kind = "no_such_kind";
    CHECK_THROWS_AS(measure(s), DomainError);
}

TEST_CASE("check kinds") {
    Measurement m;
    m.values["q"] = 0.5;
    Check c;
    c.key = "q";
    c.kind = "abs";
    c.target = 0.4;
    c.tol = 0.2;
    CHECK(evaluate(c, m).pass);
    c.tol = 0.05;
    CHECK_FALSE(evaluate(c, m).pass);
    c.kind = "lt";
    c.limit = 0.5;
    CHECK_FALSE(evaluate(c, m).pass);
    c.kind = "le";
    CHECK(evaluate(c, m).pass);
    c.kind = "range";
    c.lo = 0.0;
    c.hi = 1.0;
    CHECK(evaluate(c, m).pass);
    c.key = "missing";
    CHECK_FALSE(evaluate(c, m).found);
    CHECK_FALSE(evaluate(c, m).pass);
}

TEST_CASE("scenario run writes results, report and plots deterministically") {
    const auto dir = scratch("e2");
    const auto s = find_scenario("E2", default_scenario_dir());
    const auto r1 = run_scenario(s, dir.string());
    CHECK(r1.passed());
    const auto csv1 = read_text_file((dir / "E2" / "results.csv").string());
    CHECK(csv1.rfind("quantity,value\n", 0) == 0);
    CHECK(fs::exists(dir / "E2" / "report.txt"));
    bool svg = false;
    for (const auto& e : fs::directory_iterator(dir / "E2")) svg = svg || e.path().extension() == ".svg";
    CHECK(svg);
    run_scenario(s, dir.string());
    CHECK(read_text_file((dir / "E2" / "results.csv").string()) == csv1);
    fs::remove_all(dir);
}

TEST_CASE("a failing check fails the report") {
    auto s = find_scenario("E1", default_scenario_dir());
    Check c;
    c.name = "impossible";
    c.key = "x0";
    c.kind = "abs";
    c.target = 0.0;
    c.tol = 1e-3;
    s.checks.push_back(c);
    const auto r = run_scenario(s);
    CHECK_FALSE(r.passed());
    CHECK(format_report(r).find("FAIL") != std::string::npos);
}

TEST_CASE("sweep over a setting") {
    const auto s = find_scenario("E2", default_scenario_dir());
    const auto t = sweep(s, "a", {0.01, 0.02});
    REQUIRE(t.points.size() == 2);
    CHECK(t.points[0].report.measurement.values.at("x_star") != t.points[1].report.measurement.values.at("x_star"));
    CHECK(t.csv().find("a,") == 0);
}
