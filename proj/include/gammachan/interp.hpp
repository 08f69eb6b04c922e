#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gammachan {

// Catmull-Rom cubic on a uniform grid; ends fall back to linear. Callers pick
// the coordinate (marginal caches use ln u, Gaussian ones plain y).
struct UniformCubic {
    double a = 0.0;
    double step = 1.0;
    std::vector<double> v;

    bool covers(double x) const {
        return !v.empty() && x >= a && x <= a + step * static_cast<double>(v.size() - 1);
    }

    double operator()(double x) const {
        const double t = (x - a) / step;
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(t));
        if (i < 0) i = 0;
        if (i > n - 2) i = n - 2;
        const double u = t - static_cast<double>(i);
        if (i == 0 || i == n - 2) {
            return v[i] * (1.0 - u) + v[i + 1] * u;
        }
        const double p0 = v[i - 1], p1 = v[i], p2 = v[i + 1], p3 = v[i + 2];
        const double u2 = u * u;
        return p1 + 0.5 * u * (p2 - p0 +
               u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
               u * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

}  // namespace gammachan
