#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "switchosc/cli.hpp"
#include "switchosc/output.hpp"

using namespace switchosc;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("switchosc_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"simulate", "--a", "-1"}).code == kExitUsage);
    CHECK(cli({"simulate", "--model", "quadratic"}).code == kExitUsage);
    CHECK(cli({"reproduce"}).code == kExitUsage);
    CHECK(cli({"reproduce", "NOPE"}).code == kExitUsage);
    CHECK(cli({"validate-psi", "/nonexistent/psi.json"}).code == kExitUsage);
}

TEST_CASE("help exits with 0") { CHECK(cli({"--help"}).code == kExitOk); }

TEST_CASE("orbit find prints the fixed point") {
    const auto r = cli({"orbit", "find", "--a", "0.01"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("0.626124996889") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory CSV") {
    const auto r = cli({"simulate", "--a", "10", "--x0", "3.33333333333333", "--y0", "0", "--mode", "flow+", "--x-end", "8"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind(kTrajectoryCsvHeader, 0) == 0);
    CHECK(r.out.find("sliding") != std::string::npos);
}

TEST_CASE("regularized simulate writes v") {
    const auto r = cli({"simulate", "--a", "0.01", "--epsilon", "0.01", "--x0", "0.3", "--v0", "0", "--x-end", "3"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("layer") != std::string::npos);
}

TEST_CASE("map, manifolds and scaling tables") {
    CHECK(cli({"map", "--which", "composite", "--a", "0.1", "--range", "0.1:0.6", "--points", "5"}).code == kExitOk);
    CHECK(cli({"manifolds", "--model", "nonlinear", "--range", "0:12"}).code == kExitOk);
    CHECK(cli({"map", "--points", "0"}).code == kExitUsage);
}

TEST_CASE("reproduce writes out/<id>") {
    const auto d = scratch("rep");
    const auto r = cli({"reproduce", "E1", "--out", d.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(d / "E1" / "results.csv"));
    CHECK(fs::exists(d / "E1" / "report.txt"));
    fs::remove_all(d);
}

TEST_CASE("a failed verdict exits with 1") {
    const auto d = scratch("fail");
    write_text_file((d / "scn" / "BAD.json").string(),
                    R"({"id":"BAD","title":"t","kind":"x0_root","checks":[{"name":"n","key":"x0","kind":"abs","target":0,"tol":1e-3}]})");
    const auto r = cli({"reproduce", "BAD", "--scenarios", (d / "scn").string(), "--out", (d / "out").string()});
    CHECK(r.code == kExitFailed);
    fs::remove_all(d);
}

TEST_CASE("validate-psi and plot-from-csv") {
    const auto d = scratch("psi");
    write_text_file((d / "good.json").string(), R"({"type":"polynomial","coefficients":[0,1.5,0,-0.5]})");
    write_text_file((d / "bad.json").string(), R"({"type":"polynomial","coefficients":[0,1]})");
    CHECK(cli({"validate-psi", (d / "good.json").string()}).code == kExitOk);
    CHECK(cli({"validate-psi", (d / "bad.json").string()}).code == kExitFailed);
    const auto sim = cli({"simulate", "--a", "0.3", "--x0", "0.2", "--y0", "0.4", "--x-end", "5", "--out", (d / "t.csv").string()});
    REQUIRE(sim.code == kExitOk);
    const auto p = cli({"plot-from-csv", (d / "t.csv").string(), "--out", (d / "t.svg").string()});
    CHECK(p.code == kExitOk);
    CHECK(read_text_file((d / "t.svg").string()).find("<svg") != std::string::npos);
    write_text_file((d / "junk.csv").string(), "a,b\n");
    CHECK(cli({"plot-from-csv", (d / "junk.csv").string()}).code == kExitUsage);
    fs::remove_all(d);
}
