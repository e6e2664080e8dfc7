#pragma once

// Exact 1+3 dimensional Minkowski geometry in c = 1 units. Times are stored as
// c*t in the same length unit as the spatial coordinates; signature (+,-,-,-).

#include <string_view>

namespace spacelike::minkowski {

// Absolute tolerance on s^2 below which an interval counts as lightlike.
inline constexpr double kLightlikeTol = 1e-9;

struct Event {
    double t = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    bool is_finite() const;
    constexpr bool operator==(const Event&) const = default;
};

// Boost along e1 by rapidity `zeta`, followed by a translation of the two
// transverse coordinates.
struct Boost {
    double zeta = 0.0;
    double offset2 = 0.0;
    double offset3 = 0.0;

    double beta() const;
};

enum class IntervalKind { timelike, spacelike, lightlike };

std::string_view to_string(IntervalKind k);

struct IntervalClass {
    double s_squared = 0.0;
    IntervalKind kind = IntervalKind::lightlike;
};

// Coordinates of `e` in the frame moving with rapidity b.zeta along e1.
// Throws RangeError when the result is not finite.
Event boost(const Event& e, const Boost& b);

// Inverse of boost(): boost(inverse_boost(e, b), b) == e.
Event inverse_boost(const Event& e, const Boost& b);

IntervalClass interval(const Event& e1, const Event& e2);

IntervalKind classify(double s_squared, double tol = kLightlikeTol);

// artanh(beta). Throws DomainError for |beta| >= 1 or non-finite beta.
double rapidity_from_beta(double beta);

}  // namespace spacelike::minkowski
