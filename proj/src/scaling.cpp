#include "switchosc/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "switchosc/errors.hpp"

namespace switchosc {

ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& samples, double min_decades) {
    if (samples.size() < 4) throw DomainError("power-law fit needs at least 4 samples");
    double lo = samples.front().first, hi = lo;
    for (const auto& [x, y] : samples) {
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("power-law fit needs positive samples");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (std::log10(hi / lo) < min_decades - 1e-9) throw DomainError("insufficient decades in power-law fit");
    const double n = static_cast<double>(samples.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : samples) {
        const double lx = std::log10(x), ly = std::log10(y);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
    }
    const double cov = sxy - sx * sy / n;
    const double varx = sxx - sx * sx / n;
    const double vary = syy - sy * sy / n;
    ScalingFit f;
    f.exponent = cov / varx;
    f.intercept = (sy - f.exponent * sx) / n;
    f.r_squared = vary > 0.0 ? cov * cov / (varx * vary) : 1.0;
    f.samples = samples;
    return f;
}

}  // namespace switchosc
