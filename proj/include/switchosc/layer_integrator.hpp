#pragma once

#include <optional>
#include <utility>

#include "switchosc/core.hpp"
#include "switchosc/trajectory.hpp"

namespace switchosc {

struct LayerState {
    double x = 0.0;
    double v = 0.0;
};

// (1, dv/dx) with eps dv/dx = -a eps v - f(x, psi(v)); psi saturates outside |v| <= 1.
std::pair<double, double> layer_field(SwitchingModel m, const OscillatorParams& p, const LayerState& s);
double layer_jacobian(SwitchingModel m, const OscillatorParams& p, double x, double v);

struct LayerOptions {
    double tol = 1e-10;           // local error per unit x
    double slow_max_step = 0.05;  // cap while tracking an attracting slow manifold
    double fast_step_factor = 0.5;  // cap c*eps/|df/dlambda| elsewhere
    double sample_dx = 0.01;      // spacing of exterior arc samples
    double abs_floor = 1e-11;     // per-step absolute floor; the embedded estimate saturates near stiff manifolds
    double event_tol = 1e-12;
    bool stop_on_exit = false;    // return at the first layer exit
    std::size_t max_steps = 50'000'000;
};

// Stop when v crosses `level` in `direction` (+1 up, -1 down) at x >= x_min.
struct SectionEvent {
    double level = 0.0;
    int direction = -1;
    double x_min = 0.0;
};

struct LayerRun {
    Trajectory trajectory;
    LayerState final_state;
    bool stopped_on_section = false;
    // Integral of d(v')/dv along the path; exterior arcs contribute -a * length.
    double log_sensitivity = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

LayerRun integrate_layer(SwitchingModel m, const OscillatorParams& p, LayerState initial, double x_end,
                         const LayerOptions& opt = {}, std::optional<SectionEvent> section = std::nullopt);

}  // namespace switchosc
