#include "switchosc/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "switchosc/errors.hpp"

namespace switchosc {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Cross: return "cross";
        case EventKind::SlideEntry: return "slide-entry";
        case EventKind::SlideExit: return "slide-exit";
        case EventKind::Fold: return "fold";
        case EventKind::LayerEntry: return "layer-entry";
        case EventKind::LayerExit: return "layer-exit";
        case EventKind::Start: return "start";
        case EventKind::End: return "end";
    }
    return "?";
}

void Trajectory::add_segment(Segment s) {
    if (s.samples.empty()) return;
    if (s.samples.size() == 1 && !segments_.empty()) return;
    segments_.push_back(std::move(s));
}

double Trajectory::x_begin() const {
    if (segments_.empty()) throw DomainError("empty trajectory");
    return segments_.front().x_begin();
}

double Trajectory::x_end() const {
    if (segments_.empty()) throw DomainError("empty trajectory");
    return segments_.back().x_end();
}

const Segment& Trajectory::segment_at(double x) const {
    if (segments_.empty()) throw DomainError("empty trajectory");
    auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                               [](const Segment& s, double v) { return s.x_end() < v; });
    if (it == segments_.end()) {
        if (x <= segments_.back().x_end() + 1e-12) return segments_.back();
        throw DomainError("x outside trajectory");
    }
    if (x < it->x_begin() - 1e-12) throw DomainError("x outside trajectory");
    return *it;
}

double Trajectory::value_at(double x) const {
    const Segment& s = segment_at(x);
    if (s.arc) {
        const double y = s.arc->value(x, params_);
        return layer_scaled_ ? y / params_.epsilon : y;
    }
    const auto& v = s.samples;
    if (v.size() == 1) return v.front().y;
    auto it = std::lower_bound(v.begin(), v.end(), x, [](const Sample& a, double b) { return a.x < b; });
    if (it == v.begin()) return v.front().y;
    if (it == v.end()) return v.back().y;
    const Sample& r = *it;
    const Sample& l = *(it - 1);
    const double h = r.x - l.x;
    if (h <= 0.0) return r.y;
    const double t = (x - l.x) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * l.y + (t3 - 2 * t2 + t) * h * l.slope + (-2 * t3 + 3 * t2) * r.y +
           (t3 - t2) * h * r.slope;
}

std::vector<Sample> Trajectory::flatten() const {
    std::vector<Sample> out;
    for (const auto& s : segments_) {
        for (const auto& p : s.samples) {
            if (!out.empty() && p.x <= out.back().x) continue;
            out.push_back(p);
        }
    }
    return out;
}

void Trajectory::check_invariants(double tol) const {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        for (std::size_t k = 1; k < s.samples.size(); ++k)
            if (!(s.samples[k].x > s.samples[k - 1].x)) throw SolverError("x not strictly increasing");
        if (i > 0) {
            const auto& prev = segments_[i - 1].samples.back();
            const auto& cur = s.samples.front();
            const double scale = 1.0 + std::fabs(prev.y);
            if (std::fabs(prev.x - cur.x) > tol || std::fabs(prev.y - cur.y) > tol * scale)
                throw SolverError("segments do not abut");
        }
    }
}

Segment sample_arc(const HalfPlaneArc& arc, double x1, const OscillatorParams& p, double dx, double scale) {
    Segment s;
    s.mode = flow_mode(arc.side);
    s.arc = arc;
    const double len = x1 - arc.x0;
    const int n = std::max(1, static_cast<int>(std::ceil(len / dx)));
    s.samples.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double x = (k == n) ? x1 : arc.x0 + len * k / n;
        double y = (k == 0) ? arc.y0 : arc.value(x, p);
        if (k == n && arc.x0 != x1) y = arc.value(x, p);
        s.samples.push_back({x, y / scale, arc.slope(x, p) / scale});
    }
    return s;
}

}  // namespace switchosc
