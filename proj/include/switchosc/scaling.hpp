#pragma once

#include <utility>
#include <vector>

namespace switchosc {

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log10 prefactor
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> samples;
};

// Least squares of log10(y) against log10(x). Needs >= 4 positive samples whose
// abscissae span at least `min_decades`.
ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& samples, double min_decades = 2.0);

}  // namespace switchosc
