#pragma once

#include <vector>

#include "switchosc/core.hpp"
#include "switchosc/layer_integrator.hpp"
#include "switchosc/scaling.hpp"
#include "switchosc/sliding.hpp"
#include "switchosc/trajectory.hpp"

namespace switchosc {

// Critical manifold psi(v) = lambda(x) over one sliding branch (global index).
struct CriticalBranchReg {
    SlidingBranch branch;
    const OscillatorParams* params = nullptr;

    double v0(double x) const;
    double dv0(double x) const;
    // d(layer field)/dv on the manifold, times eps; negative means attracting.
    double normal_rate(double x) const;
    // First-order slow-manifold term; v = v0 + eps*v1.
    double v1(double x) const;
};

CriticalBranchReg critical_branch_reg(SwitchingModel m, int index, const OscillatorParams& p);
double critical_branch(SwitchingModel m, int index, double x, const OscillatorParams& p = {});

// x^{+-}_{eps,n} = n/omega +- (-1)^{n+1} asin(a eps)/(pi omega).
double fold_point(Side s, int n, const OscillatorParams& p);

struct SlowManifoldValue {
    double v0 = 0.0;
    double v1 = 0.0;
    double v = 0.0;  // v0 + eps v1
};

// Half index: branch 2n of the nonlinear model. Throws near folds (psi'(v0) <= 0.1).
SlowManifoldValue slow_manifold_expansion(int n, double x, const OscillatorParams& p);

struct ExitMeasurement {
    double x_e = 0.0;
    double x_fold = 0.0;
    double deviation = 0.0;  // x_e - x_fold
    double x_start = 0.0;
};

// Starts on the slow manifold of branch 2n and returns the first exit through v = -1.
ExitMeasurement measure_exit_point(int n, const OscillatorParams& p, const LayerOptions& opt = {});

struct ExitScalingPoint {
    int n = 0;
    double epsilon = 0.0;
    ExitMeasurement m;
};

struct ExitScaling {
    ScalingFit fit_eps;
    ScalingFit fit_n;
    std::vector<ExitScalingPoint> eps_points;
    std::vector<ExitScalingPoint> n_points;
};

// Runs both sweeps concurrently. Samples with n < 3 or a*eps > 0.01 are left out of the fits.
ExitScaling exit_scaling_fit(double a, const std::vector<double>& eps_grid, int n_fixed,
                             const std::vector<int>& n_grid, double eps_fixed);

// Exterior flow from v = side*1 until it meets the same boundary again.
double boundary_return_map(Side s, double x_start, const OscillatorParams& p);

struct RegularizedReturn {
    double x_next = 0.0;
    double derivative = 0.0;      // from the variational equation
    double log_derivative = 0.0;  // natural log of |derivative|
    LayerRun run;
};

// Linear model: from (x, v = 0) moving down to the next downward v = 0 crossing after x + 1.
// Throws CapturedError when `allow_capture` is false and a layer residence exceeds 0.5 in x.
RegularizedReturn regularized_return_linear(double x, const OscillatorParams& p, bool allow_capture,
                                            const LayerOptions& opt = {});
double regularized_poincare_linear(double x, const OscillatorParams& p);

struct RegularizedFixedPoint {
    double x_star = 0.0;
    double derivative = 0.0;
    double residual = 0.0;
};

RegularizedFixedPoint find_regularized_nonsliding_linear(const OscillatorParams& p);

struct RegularizedSlidingOrbit {
    Trajectory trajectory;
    double x_star = 0.0;
    double period_error = 0.0;       // |P(x*) - x* - 4|
    double contraction = 0.0;        // variational |dP/dx|
    double log10_contraction = 0.0;
    double contraction_fd = 0.0;     // central difference, step fd_step
    double fd_step = 1e-4;
    int captured_branch = -1;
};

RegularizedSlidingOrbit find_regularized_sliding_orbit_linear(const OscillatorParams& p);

// Half index n: branch 2n, fold x^-_{eps,2n}.
struct VrReference {
    double x_fold = 0.0;
    double x_reentry = 0.0;
    double x_next_fold = 0.0;
    HalfPlaneArc arc;
    OscillatorParams params;

    double x_eps_a() const { return x_reentry - x_fold; }
    double value(double x) const;  // 4-periodic extension
};

VrReference v_r_reference(int n, const OscillatorParams& p);

struct WindowDistance {
    int n = 0;
    double x_lo = 0.0;
    double sup_distance = 0.0;
    double distance_to_next = 0.0;  // sup |v(x) - v(x+4)| over the window
};

std::vector<WindowDistance> convergence_to_vr(const Trajectory& t, int n_lo, int n_hi, double grid = 1e-3);

struct CaptureRun {
    int branch = -1;  // global index
    double x_from = 0.0;
    double x_to = 0.0;
};

// |v - v0| < 5 eps |v1| sustained over min_length; labels the containing layer segments.
std::vector<CaptureRun> detect_captures(Trajectory& t, double min_length = 0.5);

}  // namespace switchosc
