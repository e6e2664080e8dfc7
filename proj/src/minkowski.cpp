#include "spacelike/minkowski.hpp"

#include "spacelike/errors.hpp"

#include <cmath>
#include <string>

namespace spacelike::minkowski {

namespace {

Event checked(const Event& e, const char* what) {
    if (!e.is_finite()) {
        throw RangeError(std::string(what) + ": non-finite coordinates");
    }
    return e;
}

}  // namespace

bool Event::is_finite() const {
    return std::isfinite(t) && std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
}

double Boost::beta() const { return std::tanh(zeta); }

std::string_view to_string(IntervalKind k) {
    switch (k) {
        case IntervalKind::timelike: return "timelike";
        case IntervalKind::spacelike: return "spacelike";
        case IntervalKind::lightlike: return "lightlike";
    }
    return "unknown";
}

Event boost(const Event& e, const Boost& b) {
    const double ch = std::cosh(b.zeta);
    const double sh = std::sinh(b.zeta);
    return checked({e.t * ch - e.x1 * sh, -e.t * sh + e.x1 * ch, e.x2 + b.offset2, e.x3 + b.offset3},
                   "boost");
}

Event inverse_boost(const Event& e, const Boost& b) {
    const double ch = std::cosh(b.zeta);
    const double sh = std::sinh(b.zeta);
    return checked({e.t * ch + e.x1 * sh, e.t * sh + e.x1 * ch, e.x2 - b.offset2, e.x3 - b.offset3},
                   "inverse_boost");
}

IntervalKind classify(double s_squared, double tol) {
    if (std::abs(s_squared) <= tol) return IntervalKind::lightlike;
    return s_squared > 0.0 ? IntervalKind::timelike : IntervalKind::spacelike;
}

IntervalClass interval(const Event& e1, const Event& e2) {
    const double dt = e2.t - e1.t;
    const double d1 = e2.x1 - e1.x1;
    const double d2 = e2.x2 - e1.x2;
    const double d3 = e2.x3 - e1.x3;
    const double s2 = dt * dt - d1 * d1 - d2 * d2 - d3 * d3;
    return {s2, classify(s2)};
}

double rapidity_from_beta(double beta) {
    if (!std::isfinite(beta) || std::abs(beta) >= 1.0) {
        throw DomainError("rapidity_from_beta: |beta| must be < 1");
    }
    return std::atanh(beta);
}

}  // namespace spacelike::minkowski
