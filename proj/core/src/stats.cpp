#include "curvehedge/stats.hpp"

#include <stdexcept>

namespace curvehedge {

RunningStats summarize(std::span<const double> values) {
    RunningStats s;
    for (double v : values) s.add(v);
    return s;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("regression_slope needs two equally sized series of length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("regression_slope: x values are all equal");
    return sxy / sxx;
}

bool within_standard_errors(double a, double b, double se_a, double se_b, double k, double floor) {
    return std::abs(a - b) <= k * std::sqrt(se_a * se_a + se_b * se_b) + floor;
}

}  // namespace curvehedge
