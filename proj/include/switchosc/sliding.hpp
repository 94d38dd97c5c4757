#pragma once

#include <optional>
#include <string>
#include <vector>

#include "switchosc/core.hpp"
#include "switchosc/trajectory.hpp"

namespace switchosc {

enum class FastStability { Attracting, Repelling };
std::string_view to_string(FastStability s);

// Linear: domain (2/3 + 2n, 4/3 + 2n), lambda = -1 - sec(pi x).
// Nonlinear: domain (2n/3, 2n), lambda = 2(n/x - 1).
struct SlidingBranch {
    SwitchingModel model = SwitchingModel::Linear;
    int n = 0;
    double lo = 0.0;
    double hi = 0.0;

    double lambda(double x) const;
    double dlambda(double x) const;
    FastStability stability() const;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};

SlidingBranch make_branch(SwitchingModel m, int n);
std::vector<SlidingBranch> linear_branches(double x_lo, double x_hi);
std::vector<SlidingBranch> nonlinear_branches(double x_lo, double x_hi);
std::vector<SlidingBranch> branches(SwitchingModel m, double x_lo, double x_hi);

struct BranchSelection {
    enum class Kind { Crossing, Branch, Fold } kind = Kind::Crossing;
    std::optional<SlidingBranch> branch;
    double lambda = 0.0;
};

// From S+: largest root in (-1, 1); from S-: smallest. Roots at +-1 give Fold.
// `exclude` skips a branch index (used when leaving a branch at its end).
BranchSelection select_branch_on_entry(SwitchingModel m, double x_entry, Side from_side, int exclude = -1);

struct DiscontinuousOptions {
    double tol = 1e-12;
    double sample_dx = 0.01;
    std::size_t max_events = 100000;
};

// Initial state semantics: y != 0 flows in the matching half-plane; y == 0 with mode
// FlowPlus/FlowMinus departs into that half-plane; y == 0 with mode Sliding slides on
// `branch` (any stability), or with branch == -1 lets the threshold dynamics decide.
Trajectory simulate_discontinuous(SwitchingModel m, const OscillatorParams& p, const HybridState& initial,
                                  double x_end, const DiscontinuousOptions& opt = {});

struct SlidingOrbitLinear {
    Trajectory trajectory;
    double x1 = 0.0;  // P+(10/3)
    double x2 = 0.0;  // P-(x1)
    double x3 = 0.0;  // P+(x2), landing point
    double closure_error = 0.0;
};

// Throws NoRootError when the landing point misses (20/3, 22/3).
SlidingOrbitLinear find_sliding_period4_linear(double a, double tol = 1e-8);

struct SlidingOrbitNonlinear {
    Trajectory trajectory;
    double x_a = 0.0;
    double closure_error = 0.0;
    double max_y = 0.0;
};

SlidingOrbitNonlinear find_sliding_period4_nonlinear(double a, int periods = 1);

struct NonslidingExclusionRow {
    int n = 0;
    double plus_landing = 0.0;   // P+(4n-2)
    double plus_margin = 0.0;    // distance inside (4n-4/3, 4n-2/3)
    double minus_landing = 0.0;  // P-(4n)
    double minus_margin = 0.0;   // distance inside (4n+2, 4n+4)
};

struct NonslidingExclusionReport {
    std::vector<NonslidingExclusionRow> rows;
    bool all_positive = true;
};

NonslidingExclusionReport check_no_nonsliding_periodic_nonlinear(double a, int n_max);

struct Confinement {
    double x_T = 0.0;
    bool confined = false;
};

Confinement confinement_check(const Trajectory& t, double tol = 1e-12);

struct AgeingRow {
    int n = 0;
    double branch_width = 0.0;
    double slid_length = 0.0;
};

std::vector<AgeingRow> ageing_metrics(SwitchingModel m, double x_lo, double x_hi);
std::vector<AgeingRow> ageing_metrics(const Trajectory& t);

enum class PeriodicityVerdict { Periodic, UnverifiedAtThreshold, Aperiodic };
std::string_view to_string(PeriodicityVerdict v);

// Compares the event pattern over [x_from, x_from + period] with the next period.
// Nonlinear sliding runs other than the canonical orbit are never reported Periodic.
PeriodicityVerdict assess_periodicity(const Trajectory& t, double x_from, double period, double tol = 1e-8);

}  // namespace switchosc
