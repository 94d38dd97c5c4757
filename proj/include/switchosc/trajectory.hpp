#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "switchosc/analytic_flow.hpp"
#include "switchosc/core.hpp"

namespace switchosc {

enum class EventKind { Cross, SlideEntry, SlideExit, Fold, LayerEntry, LayerExit, Start, End };
std::string_view to_string(EventKind k);

struct Sample {
    double x = 0.0;
    double y = 0.0;      // y, or v = y/eps for layer-scaled trajectories
    double slope = 0.0;  // dy/dx (or dv/dx)
};

struct Segment {
    Mode mode = Mode::FlowPlus;
    int branch = -1;
    std::vector<Sample> samples;
    std::optional<HalfPlaneArc> arc;  // exact representation of exterior arcs (in y)

    double x_begin() const { return samples.front().x; }
    double x_end() const { return samples.back().x; }
};

struct Event {
    double x = 0.0;
    EventKind kind = EventKind::Cross;
    int branch = -1;
};

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(SwitchingModel model, OscillatorParams params, bool layer_scaled)
        : model_(model), params_(std::move(params)), layer_scaled_(layer_scaled) {}

    SwitchingModel model() const { return model_; }
    const OscillatorParams& params() const { return params_; }
    bool layer_scaled() const { return layer_scaled_; }

    const std::vector<Segment>& segments() const { return segments_; }
    std::vector<Segment>& mutable_segments() { return segments_; }
    const std::vector<Event>& events() const { return events_; }

    void add_segment(Segment s);
    void add_event(Event e) { events_.push_back(e); }

    bool empty() const { return segments_.empty(); }
    double x_begin() const;
    double x_end() const;

    // Exact on analytic arcs, cubic Hermite elsewhere.
    double value_at(double x) const;
    const Segment& segment_at(double x) const;

    std::vector<Sample> flatten() const;

    // Throws SolverError when segments do not abut or x is not increasing.
    void check_invariants(double tol = 1e-9) const;

private:
    SwitchingModel model_ = SwitchingModel::Linear;
    OscillatorParams params_;
    bool layer_scaled_ = false;
    std::vector<Segment> segments_;
    std::vector<Event> events_;
};

// Samples of an exterior arc on [x0, x1] with spacing <= dx (endpoints included).
Segment sample_arc(const HalfPlaneArc& arc, double x1, const OscillatorParams& p, double dx, double scale = 1.0);

}  // namespace switchosc
