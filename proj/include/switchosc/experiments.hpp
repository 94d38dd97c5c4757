#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace switchosc {

// kind: abs (|m - target| <= tol), lt, le, gt, ge (against limit), range (lo < m < hi), true (m == 1)
struct Check {
    std::string name;
    std::string key;
    std::string kind = "abs";
    double target = 0.0;
    double tol = 0.0;
    double limit = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::string basis;  // reference | exact | derived | budget
};

struct Scenario {
    std::string id;
    std::string title;
    std::string kind;
    int criterion = 0;  // 0 when the scenario only produces artifacts
    nlohmann::json settings = nlohmann::json::object();
    std::vector<Check> checks;
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
// Looks for <dir>/<id>.json.
Scenario find_scenario(const std::string& id, const std::string& dir);
std::vector<std::string> list_scenarios(const std::string& dir);

// $SWITCHOSC_SCENARIOS, else the scenarios/ directory of the source tree.
std::string default_scenario_dir();
// $SWITCHOSC_OUT, else "out".
std::string default_output_dir();

struct Artifact {
    std::string name;  // file name inside out/<id>/
    std::string content;
};

struct Measurement {
    std::map<std::string, double> values;
    std::vector<std::string> notes;
    std::vector<Artifact> artifacts;
    double runtime_s = 0.0;
};

// Runs the operation bound to scenario.kind. Missing settings take the default grids.
Measurement measure(const Scenario& s);
std::vector<std::string> known_kinds();

struct CheckVerdict {
    Check check;
    double measured = 0.0;
    bool found = false;
    bool pass = false;
};

CheckVerdict evaluate(const Check& c, const Measurement& m);

struct Report {
    std::string id;
    Measurement measurement;
    std::vector<CheckVerdict> verdicts;
    std::string error;
    std::vector<std::string> written;
    bool passed() const;
};

// out_dir empty: nothing is written. Otherwise writes out_dir/<id>/{results.csv, report.txt, artifacts}.
Report run_scenario(const Scenario& s, const std::string& out_dir = "");
std::string format_report(const Report& r);
// quantity,value rows; runtime excluded so repeated runs are byte-identical.
std::string results_csv(const Measurement& m);

struct SweepPoint {
    double value = 0.0;
    Report report;
};

struct SweepTable {
    std::string parameter;
    std::vector<SweepPoint> points;
    bool all_passed() const;
    std::string csv() const;
};

// Overrides settings[parameter] per grid value; points run concurrently.
SweepTable sweep(const Scenario& tmpl, const std::string& parameter, const std::vector<double>& grid);

}  // namespace switchosc
