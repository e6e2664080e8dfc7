#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace spacelike::detail {

// Real roots of a t^2 + b t + c = 0 in ascending order; degrades to the linear
// case for vanishing a. A slightly negative discriminant is treated as a
// double root.
inline std::vector<double> real_roots(double a, double b, double c) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1.0});
    if (std::abs(a) <= 1e-14 * scale) {
        if (std::abs(b) <= 1e-14 * scale) return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        if (disc > -1e-12 * scale * scale) return {-b / (2.0 * a)};
        return {};
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> r;
    r.push_back(q / a);
    if (q != 0.0) r.push_back(c / q);
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace spacelike::detail
